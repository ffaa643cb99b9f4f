//! Multiplications on `H1(p)` determined by the action on `b`.
//!
//! A nearring with identity `a` on `H1` is fixed by the coefficients of
//! `x*b = a*alpha(x) + b*beta(x) + c*gamma(x) + d*phi(x)`; left
//! distributivity then determines `x*y` for every `y`.

use std::io::BufRead;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::h1::H1Arith;
use crate::modular::reduce;
use crate::nearring::{verify_axioms, AxiomReport, Multiplication, NearringInstance, VerifyMode};
use crate::pcgroup::Coordinates;

/// The four coefficient maps, indexed by element index, values in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapQuad {
    pub p: u32,
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub gamma: Vec<u32>,
    pub phi: Vec<u32>,
}

impl MapQuad {
    /// Builds a quad from per-element values, reducing mod `p` and checking
    /// the row of the identity `a`.
    pub fn from_fn(p: u32, f: impl Fn(&Coordinates) -> [i64; 4]) -> Result<Self> {
        let arith = H1Arith::new(p)?;
        let n = arith.order();
        let (mut alpha, mut beta, mut gamma, mut phi) =
            (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for idx in 0..n as u32 {
            let v = f(&arith.element(idx));
            alpha.push(reduce(v[0], p));
            beta.push(reduce(v[1], p));
            gamma.push(reduce(v[2], p));
            phi.push(reduce(v[3], p));
        }
        let q = MapQuad { p, alpha, beta, gamma, phi };
        q.validate()?;
        Ok(q)
    }

    pub fn order(&self) -> usize {
        self.alpha.len()
    }

    /// `a*b = b` forces `(alpha, beta, gamma, phi)(a) = (0, 1, 0, 0)`.
    pub fn validate(&self) -> Result<()> {
        let n = (self.p as usize).pow(4);
        for (name, v) in [("alpha", &self.alpha), ("beta", &self.beta), ("gamma", &self.gamma), ("phi", &self.phi)] {
            if v.len() != n {
                return Err(Error::InvalidMaps(format!("{name} has {} entries, expected {n}", v.len())));
            }
            if let Some(bad) = v.iter().find(|&&x| x >= self.p) {
                return Err(Error::InvalidMaps(format!("{name} value {bad} not reduced mod {}", self.p)));
            }
        }
        let a = identity_index(self.p);
        let row = self.at(a);
        if row != [0, 1, 0, 0] {
            return Err(Error::InvalidMaps(format!(
                "identity row (alpha,beta,gamma,phi)(a) = {row:?}, expected [0, 1, 0, 0]"
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn at(&self, idx: u32) -> [u32; 4] {
        let i = idx as usize;
        [self.alpha[i], self.beta[i], self.gamma[i], self.phi[i]]
    }

    pub fn alpha_vanishes(&self) -> bool {
        self.alpha.iter().all(|&v| v == 0)
    }

    /// All four maps vanish at `0`.
    pub fn vanish_at_zero(&self) -> bool {
        self.at(0) == [0, 0, 0, 0]
    }

    /// CSV rows `index,alpha,beta,gamma,phi`, one per element, any order.
    /// An optional non-numeric header line is skipped.
    pub fn read_csv<R: BufRead>(p: u32, r: R) -> Result<Self> {
        H1Arith::new(p)?;
        let n = (p as usize).pow(4);
        let mut rows: Vec<Option<[u32; 4]>> = vec![None; n];
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if lineno == 0 && fields[0].parse::<i64>().is_err() {
                continue;
            }
            let vals: Vec<i64> = fields
                .iter()
                .map(|s| s.parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidMaps(format!("line {}: {e}", lineno + 1)))?;
            let [idx, al, be, ga, ph] = vals[..] else {
                return Err(Error::InvalidMaps(format!("line {}: expected 5 fields", lineno + 1)));
            };
            if idx < 0 || idx as usize >= n {
                return Err(Error::InvalidMaps(format!("line {}: index {idx} out of range", lineno + 1)));
            }
            if rows[idx as usize].is_some() {
                return Err(Error::InvalidMaps(format!("line {}: duplicate index {idx}", lineno + 1)));
            }
            rows[idx as usize] = Some([al, be, ga, ph].map(|v| reduce(v, p)));
        }
        if let Some(missing) = rows.iter().position(Option::is_none) {
            return Err(Error::InvalidMaps(format!("no row for index {missing}")));
        }
        let rows: Vec<[u32; 4]> = rows.into_iter().map(Option::unwrap).collect();
        let q = MapQuad {
            p,
            alpha: rows.iter().map(|r| r[0]).collect(),
            beta: rows.iter().map(|r| r[1]).collect(),
            gamma: rows.iter().map(|r| r[2]).collect(),
            phi: rows.iter().map(|r| r[3]).collect(),
        };
        q.validate()?;
        Ok(q)
    }

    pub fn load(p: u32, path: &Path) -> Result<Self> {
        Self::read_csv(p, std::io::BufReader::new(std::fs::File::open(path)?))
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,alpha,beta,gamma,phi")?;
        for i in 0..self.order() as u32 {
            let [a, b, c, d] = self.at(i);
            writeln!(w, "{i},{a},{b},{c},{d}")?;
        }
        Ok(())
    }
}

/// Index of `a = (1,0,0,0)`.
pub fn identity_index(p: u32) -> u32 {
    p * p * p
}

/// `beta(x) = x1^2`, `gamma = alpha = 0`, `phi(x) = x2^2` when `x1 = 0` and
/// `0` otherwise.
pub fn example1_maps(p: u32) -> Result<MapQuad> {
    MapQuad::from_fn(p, |x| {
        let [x1, x2, _, _] = x.0.map(i64::from);
        [0, x1 * x1, 0, if x1 == 0 { x2 * x2 } else { 0 }]
    })
}

/// `beta = 1`, all other maps zero.
pub fn trivial_beta1_maps(p: u32) -> Result<MapQuad> {
    MapQuad::from_fn(p, |_| [0, 1, 0, 0])
}

/// Named builtin map sets accepted by the CLI.
pub fn builtin_maps(name: &str, p: u32) -> Result<MapQuad> {
    match name {
        "example1" => example1_maps(p),
        "trivial-beta1" => trivial_beta1_maps(p),
        other => Err(Error::Usage(format!("unknown builtin maps {other:?} (expected example1 or trivial-beta1)"))),
    }
}

/// Modular evaluation helpers for the closed forms.
#[derive(Clone, Copy)]
struct Zp {
    p: i64,
    arith: H1Arith,
}

impl Zp {
    #[inline]
    fn r(&self, v: i64) -> i64 {
        v.rem_euclid(self.p)
    }

    #[inline]
    fn c2(&self, n: i64) -> i64 {
        self.arith.binomial().binom2_int(n) as i64
    }

    #[inline]
    fn c3(&self, n: i64) -> i64 {
        self.arith.binomial().binom3_int(n) as i64
    }

    /// Product reduced after every factor.
    #[inline]
    fn mul(&self, fs: &[i64]) -> i64 {
        fs.iter().fold(1, |acc, &f| self.r(acc * self.r(f)))
    }

    fn coords(&self, v: [i64; 4]) -> Coordinates {
        Coordinates(v.map(|c| self.r(c) as u32))
    }
}

/// Which transcription of the general product is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneralVariant {
    /// The closed form coefficient by coefficient.
    Printed,
    /// `x*y1 + (xb)*y2 + (xc)*y3 + (xd)*y4` evaluated with group operations,
    /// `xc = -x - xb + x + xb`, `xd = -x - xc + x + xc`.
    Structural,
}

/// General product with identity `a`, `alpha` arbitrary.
pub fn mul_general(arith: &H1Arith, maps: &MapQuad, x: &Coordinates, y: &Coordinates, variant: GeneralVariant) -> Coordinates {
    match variant {
        GeneralVariant::Printed => mul_general_printed(arith, maps, x, y),
        GeneralVariant::Structural => mul_structural(arith, maps, x, y),
    }
}

fn mul_general_printed(arith: &H1Arith, maps: &MapQuad, x: &Coordinates, y: &Coordinates) -> Coordinates {
    let z = Zp { p: arith.prime() as i64, arith: *arith };
    let [x1, x2, x3, x4] = x.0.map(i64::from);
    let [y1, y2, y3, y4] = y.0.map(i64::from);
    let [al, be, ga, ph] = maps.at(arith.index(x)).map(i64::from);
    let m = |fs: &[i64]| z.mul(fs);
    let a = x1 * y1 + al * y2;
    let b = x2 * y1 + be * y2;
    let c = x3 * y1 - m(&[x1, x2, z.c2(y1)]) - m(&[x2, al, y1, y2]) + ga * y2 - m(&[al, be, z.c2(y2)])
        + m(&[x1, be, y3])
        - m(&[x2, al, y3]);
    let d = x4 * y1 + m(&[x2, z.c2(x1), z.c2(y1)]) - m(&[x1, x3, z.c2(y1)]) + m(&[x1, x1, x2, z.c3(y1)])
        + m(&[x2, y1, z.c2(al * y2)])
        - m(&[al, x3, y1, y2])
        + m(&[x1, x2, al, z.c2(y1), y2])
        + ph * y2
        + m(&[be, z.c2(al), z.c2(y2)])
        - m(&[al, ga, z.c2(y2)])
        + m(&[al, al, be, z.c3(y2)])
        + m(&[x1, ga, y3])
        - m(&[be, z.c2(x1), y3])
        + m(&[x2, z.c2(al), y3])
        - m(&[x3, al, y3])
        + m(&[x1, x1, be, y4])
        - m(&[x1, x2, al, y4]);
    z.coords([a, b, c, d])
}

fn xb(arith: &H1Arith, maps: &MapQuad, x: &Coordinates) -> Coordinates {
    Coordinates(maps.at(arith.index(x)))
}

/// `-u - v + u + v`
fn comm(arith: &H1Arith, u: &Coordinates, v: &Coordinates) -> Coordinates {
    arith.commutator(u, v)
}

/// `x*c` from left distributivity over `c = -a - b + a + b`.
pub fn xc_structural(arith: &H1Arith, maps: &MapQuad, x: &Coordinates) -> Coordinates {
    comm(arith, x, &xb(arith, maps, x))
}

/// `x*d` from left distributivity over `d = -a - c + a + c`.
pub fn xd_structural(arith: &H1Arith, maps: &MapQuad, x: &Coordinates) -> Coordinates {
    comm(arith, x, &xc_structural(arith, maps, x))
}

fn mul_structural(arith: &H1Arith, maps: &MapQuad, x: &Coordinates, y: &Coordinates) -> Coordinates {
    let [y1, y2, y3, y4] = y.0;
    let xc = xc_structural(arith, maps, x);
    let xd = comm(arith, x, &xc);
    let s = arith.add(&arith.smul(x, y1), &arith.smul(&xb(arith, maps, x), y2));
    let s = arith.add(&s, &arith.smul(&xc, y3));
    arith.add(&s, &arith.smul(&xd, y4))
}

/// Closed form of the product when `alpha = 0`.
pub fn mul_local(arith: &H1Arith, maps: &MapQuad, x: &Coordinates, y: &Coordinates) -> Coordinates {
    let z = Zp { p: arith.prime() as i64, arith: *arith };
    let [x1, x2, x3, x4] = x.0.map(i64::from);
    let [y1, y2, y3, y4] = y.0.map(i64::from);
    let [_, be, ga, ph] = maps.at(arith.index(x)).map(i64::from);
    let m = |fs: &[i64]| z.mul(fs);
    let a = x1 * y1;
    let b = x2 * y1 + be * y2;
    let c = x3 * y1 - m(&[x1, x2, z.c2(y1)]) + m(&[x1, be, y3]) + ga * y2;
    let d = x4 * y1 + m(&[x2, z.c2(x1), z.c2(y1)]) - m(&[x1, x3, z.c2(y1)]) + m(&[x1, x1, x2, z.c3(y1)]) + ph * y2
        + m(&[x1, ga, y3])
        - m(&[be, z.c2(x1), y3])
        + m(&[x1, x1, be, y4]);
    z.coords([a, b, c, d])
}

/// A map-driven multiplication on `H1(p)` addressed by element index.
pub struct MapMul {
    arith: H1Arith,
    maps: Arc<MapQuad>,
    kind: MulKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MulKind {
    Local,
    General(GeneralVariant),
}

impl MapMul {
    pub fn new(maps: Arc<MapQuad>, kind: MulKind) -> Result<Self> {
        let arith = H1Arith::new(maps.p)?;
        maps.validate()?;
        if kind == MulKind::Local && !maps.alpha_vanishes() {
            return Err(Error::InvalidMaps("the local product needs alpha = 0".into()));
        }
        Ok(MapMul { arith, maps, kind })
    }

    pub fn mul_coords(&self, x: &Coordinates, y: &Coordinates) -> Coordinates {
        match self.kind {
            MulKind::Local => mul_local(&self.arith, &self.maps, x, y),
            MulKind::General(v) => mul_general(&self.arith, &self.maps, x, y, v),
        }
    }
}

impl Multiplication for MapMul {
    fn mul(&self, x: u32, y: u32) -> u32 {
        let a = &self.arith;
        a.index(&self.mul_coords(&a.element(x), &a.element(y)))
    }
}

/// Nearring instance on `H1(p)` with identity `a` for the given maps.
pub fn build_nearring(maps: Arc<MapQuad>, kind: MulKind) -> Result<NearringInstance> {
    let p = maps.p;
    let mul = MapMul::new(maps, kind)?;
    NearringInstance::new(Arc::new(H1Arith::new(p)?), Arc::new(mul), identity_index(p))
}

/// The explicit local nearring on `H1(p)`.
pub fn build_example_nearring(p: u32) -> Result<NearringInstance> {
    build_nearring(Arc::new(example1_maps(p)?), MulKind::Local)
}

/// One pairwise congruence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub name: String,
    pub checks: u64,
    pub failures: u64,
    pub pass: bool,
    /// First failing element (indices); pairs are `[x, y]`.
    pub witness: Option<Vec<u32>>,
}

impl ConditionResult {
    fn new(name: &str) -> Self {
        ConditionResult { name: name.to_string(), pass: true, ..Default::default() }
    }

    fn record(&mut self, ok: bool, w: impl FnOnce() -> Vec<u32>) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            self.pass = false;
            if self.witness.is_none() {
                self.witness = Some(w());
            }
        }
    }

    /// `self` covers lower indices than `other`.
    fn merge(mut self, other: ConditionResult) -> Self {
        self.checks += other.checks;
        self.failures += other.failures;
        self.pass &= other.pass;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
        self
    }
}

fn merge_all(parts: Vec<Vec<ConditionResult>>) -> Vec<ConditionResult> {
    let mut it = parts.into_iter();
    let first = it.next().unwrap_or_default();
    it.fold(first, |acc, part| acc.into_iter().zip(part).map(|(a, b)| a.merge(b)).collect())
}

/// Sweeps every pair `(x, y)`; `check` pushes one verdict per condition.
fn sweep_pairs(
    p: u32,
    names: &[&str],
    check: impl Fn(&Coordinates, &Coordinates, &mut dyn FnMut(usize, bool)) + Sync,
) -> Vec<ConditionResult> {
    let arith = H1Arith::new(p).expect("validated prime");
    let n = arith.order() as u32;
    let parts: Vec<Vec<ConditionResult>> = (0..n)
        .into_par_iter()
        .map(|xi| {
            let mut res: Vec<ConditionResult> = names.iter().map(|s| ConditionResult::new(s)).collect();
            let x = arith.element(xi);
            for yi in 0..n {
                let y = arith.element(yi);
                check(&x, &y, &mut |k, ok| res[k].record(ok, || vec![xi, yi]));
            }
            res
        })
        .collect();
    merge_all(parts)
}

/// The maps at a product compared with the maps at the factors.
#[derive(Clone, Debug, Serialize)]
pub struct H16Report {
    pub p: u32,
    pub variant: GeneralVariant,
    /// Statement (0): all maps vanish at `0` exactly when `0*y = 0` for all `y`.
    pub maps_vanish_at_zero: bool,
    pub zero_symmetric: bool,
    pub statement0: bool,
    /// Statements (1), (2): closed forms of `x*c`, `x*d` against the
    /// left-distributive expansion.
    pub statement1: ConditionResult,
    pub statement2: ConditionResult,
    pub condition3: ConditionResult,
    pub condition4: ConditionResult,
    pub condition5: ConditionResult,
    /// (6) with the `x1*x2*alpha(x)*C(alpha(y),2)` term multiplied by `y2`.
    pub condition6_printed: ConditionResult,
    /// (6) with that factor read as `beta(y)`.
    pub condition6: ConditionResult,
    /// `x*(y*b) = (x*y)*b` by direct evaluation.
    pub associates_with_b: ConditionResult,
}

impl H16Report {
    /// Conditions (3)-(6) in their corrected reading plus statements (0)-(2).
    pub fn pass(&self) -> bool {
        self.statement0
            && self.statement1.pass
            && self.statement2.pass
            && self.condition3.pass
            && self.condition4.pass
            && self.condition5.pass
            && self.condition6.pass
    }
}

/// Right-hand sides of conditions (3)-(6) for `(x, y)`; the last entry is
/// the printed reading of (6).
fn h16_rhs(z: &Zp, x: &Coordinates, mx: [i64; 4], my: [i64; 4]) -> [i64; 5] {
    let [x1, x2, x3, x4] = x.0.map(i64::from);
    let [ax, bx, gx, px] = mx;
    let [ay, by, gy, py] = my;
    let m = |fs: &[i64]| z.mul(fs);
    let al3 = x1 * ay + ax * by;
    let be4 = x2 * ay + bx * by;
    let ga5 = x3 * ay - m(&[x1, x2, z.c2(ay)]) - m(&[x2, ax, ay, by]) + gx * by - m(&[ax, bx, z.c2(by)])
        + m(&[x1, bx, gy])
        - m(&[x2, ax, gy]);
    let common = x4 * ay + m(&[x2, z.c2(x1), z.c2(ay)]) - m(&[x1, x3, z.c2(ay)]) + m(&[x1, x1, x2, z.c3(ay)])
        + m(&[x2, ay, z.c2(ax * by)])
        - m(&[ax, x3, ay, by])
        + px * by
        + m(&[bx, z.c2(ax), z.c2(by)])
        - m(&[ax, gx, z.c2(by)])
        + m(&[ax, ax, bx, z.c3(by)])
        + m(&[x1, gx, gy])
        - m(&[bx, z.c2(x1), gy])
        + m(&[x2, z.c2(ax), gy])
        - m(&[x3, ax, gy])
        + m(&[x1, x1, bx, py])
        - m(&[x1, x2, ax, py]);
    let ph6 = common + m(&[x1, x2, ax, z.c2(ay), by]);
    [al3, be4, ga5, ph6, common]
}

/// Checks statements (0)-(6) for the general product.
pub fn check_h16_conditions(maps: &MapQuad, variant: GeneralVariant) -> Result<H16Report> {
    maps.validate()?;
    let p = maps.p;
    let arith = H1Arith::new(p)?;
    let z = Zp { p: p as i64, arith };
    let n = arith.order() as u32;
    let b = Coordinates::generator(1);
    let m = |fs: &[i64]| z.mul(fs);

    // (1), (2) per element
    let mut s1 = ConditionResult::new("statement1");
    let mut s2 = ConditionResult::new("statement2");
    for xi in 0..n {
        let x = arith.element(xi);
        let [x1, x2, x3, _] = x.0.map(i64::from);
        let [al, be, ga, _] = maps.at(xi).map(i64::from);
        let xc = z.coords([
            0,
            0,
            x1 * be - x2 * al,
            m(&[x1, ga]) - m(&[be, z.c2(x1)]) + m(&[x2, z.c2(al)]) - m(&[x3, al]),
        ]);
        let xd = z.coords([0, 0, 0, m(&[x1, x1, be]) - m(&[x1, x2, al])]);
        s1.record(xc == xc_structural(&arith, maps, &x), || vec![xi]);
        s2.record(xd == xd_structural(&arith, maps, &x), || vec![xi]);
    }

    let zero = Coordinates::ZERO;
    let zero_symmetric = (0..n).all(|yi| mul_general(&arith, maps, &zero, &arith.element(yi), variant).is_zero());
    let maps_vanish_at_zero = maps.vanish_at_zero();

    let names = ["condition3", "condition4", "condition5", "condition6_printed", "condition6", "associates_with_b"];
    let mut res = sweep_pairs(p, &names, |x, y, out| {
        let xy = mul_general(&arith, maps, x, y, variant);
        let mxy = maps.at(arith.index(&xy)).map(i64::from);
        let mx = maps.at(arith.index(x)).map(i64::from);
        let my = maps.at(arith.index(y)).map(i64::from);
        let rhs = h16_rhs(&z, x, mx, my);
        out(0, z.r(rhs[0]) == mxy[0]);
        out(1, z.r(rhs[1]) == mxy[1]);
        out(2, z.r(rhs[2]) == mxy[2]);
        let printed = rhs[4] + m(&[x.0[0] as i64, x.0[1] as i64, mx[0], z.c2(my[0]), y.0[1] as i64]);
        out(3, z.r(printed) == mxy[3]);
        out(4, z.r(rhs[3]) == mxy[3]);
        let yb = mul_general(&arith, maps, y, &b, variant);
        let lhs = mul_general(&arith, maps, x, &yb, variant);
        let rhs_b = mul_general(&arith, maps, &xy, &b, variant);
        out(5, lhs == rhs_b);
    })
    .into_iter();
    let mut next = || res.next().expect("one result per condition");
    Ok(H16Report {
        p,
        variant,
        maps_vanish_at_zero,
        zero_symmetric,
        statement0: maps_vanish_at_zero == zero_symmetric,
        statement1: s1,
        statement2: s2,
        condition3: next(),
        condition4: next(),
        condition5: next(),
        condition6_printed: next(),
        condition6: next(),
        associates_with_b: next(),
    })
}

/// Conditions for the local product (`alpha = 0`).
#[derive(Clone, Debug, Serialize)]
pub struct H19Report {
    pub p: u32,
    pub maps_vanish_at_zero: bool,
    pub zero_symmetric: bool,
    pub statement0: bool,
    /// `beta(xy) = beta(x) beta(y)`
    pub condition1: ConditionResult,
    /// `gamma(xy) = x1 beta(x) gamma(y)` as printed.
    pub condition2_printed: ConditionResult,
    /// `gamma(xy) = gamma(x) beta(y) + x1 beta(x) gamma(y)`, the `alpha = 0`
    /// case of condition (5) of the general product.
    pub condition2: ConditionResult,
    /// `phi(xy) = phi(x) beta(y) + x1 gamma(x) gamma(y)
    ///            - beta(x) C(x1,2) gamma(y) + x1^2 beta(x) phi(y)`
    pub condition3: ConditionResult,
    /// Condition (3) split by whether `x1`, `y1` vanish.
    pub cases: Vec<CaseCheck>,
    /// `x*b` lies in `L = {x1 = 0}` for every `x`.
    pub xb_in_l: bool,
}

impl H19Report {
    pub fn pass(&self) -> bool {
        self.statement0 && self.condition1.pass && self.condition2.pass && self.condition3.pass && self.xb_in_l
    }
}

/// One case of the split of condition (3) by `x1`, `y1`.
#[derive(Clone, Debug, Serialize)]
pub struct CaseCheck {
    pub label: String,
    /// Condition (3) restricted to the case.
    pub condition: ConditionResult,
    /// The shortcut `phi(xy) = phi(x) beta(y)` claimed for the case.
    pub shortcut: ConditionResult,
}

/// Checks conditions (0)-(3) of the local product, with the case split.
pub fn check_h19_conditions(maps: &MapQuad) -> Result<H19Report> {
    maps.validate()?;
    if !maps.alpha_vanishes() {
        return Err(Error::InvalidMaps("the local conditions need alpha = 0".into()));
    }
    let p = maps.p;
    let arith = H1Arith::new(p)?;
    let z = Zp { p: p as i64, arith };
    let n = arith.order() as u32;
    let zero = Coordinates::ZERO;
    let zero_symmetric = (0..n).all(|yi| mul_local(&arith, maps, &zero, &arith.element(yi)).is_zero());
    let maps_vanish_at_zero = maps.vanish_at_zero();
    let xb_in_l = (0..n).all(|xi| maps.alpha[xi as usize] == 0);

    const LABELS: [&str; 4] = [
        "x1*y1 != 0",
        "x1 = 0, y1 != 0",
        "x1 != 0, y1 = 0",
        "x1 = 0, y1 = 0",
    ];
    let names = [
        "condition1",
        "condition2_printed",
        "condition2",
        "condition3",
        "case0",
        "case0_shortcut",
        "case1",
        "case1_shortcut",
        "case2",
        "case2_shortcut",
        "case3",
        "case3_shortcut",
    ];
    let res = sweep_pairs(p, &names, |x, y, out| {
        let m = |fs: &[i64]| z.mul(fs);
        let xy = mul_local(&arith, maps, x, y);
        let [_, bxy, gxy, pxy] = maps.at(arith.index(&xy)).map(i64::from);
        let [_, bx, gx, px] = maps.at(arith.index(x)).map(i64::from);
        let [_, by, gy, py] = maps.at(arith.index(y)).map(i64::from);
        let x1 = x.0[0] as i64;
        out(0, z.r(bx * by) == bxy);
        out(1, z.r(m(&[x1, bx, gy])) == gxy);
        out(2, z.r(gx * by + m(&[x1, bx, gy])) == gxy);
        let ok3 = z.r(px * by + m(&[x1, gx, gy]) - m(&[bx, z.c2(x1), gy]) + m(&[x1, x1, bx, py])) == pxy;
        out(3, ok3);
        let case = match (x.0[0] == 0, y.0[0] == 0) {
            (false, false) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (true, true) => 3,
        };
        out(4 + 2 * case, ok3);
        out(5 + 2 * case, z.r(px * by) == pxy);
    });
    let mut it = res.into_iter();
    let mut next = || it.next().expect("one result per condition");
    let condition1 = next();
    let condition2_printed = next();
    let condition2 = next();
    let condition3 = next();
    let cases = LABELS
        .iter()
        .map(|label| {
            let mut condition = next();
            let mut shortcut = next();
            condition.name = "condition3".into();
            shortcut.name = "phi(xy) = phi(x) beta(y)".into();
            CaseCheck { label: label.to_string(), condition, shortcut }
        })
        .collect();
    Ok(H19Report {
        p,
        maps_vanish_at_zero,
        zero_symmetric,
        statement0: maps_vanish_at_zero == zero_symmetric,
        condition1,
        condition2_printed,
        condition2,
        condition3,
        cases,
        xb_in_l,
    })
}

/// Outcome of choosing between the two transcriptions of the general product.
#[derive(Clone, Debug, Serialize)]
pub struct VariantSelection {
    /// Pairs on which the two variants differ, and the first one.
    pub disagreements: u64,
    pub first_disagreement: Option<[u32; 2]>,
    pub printed_is_nearring: bool,
    pub structural_is_nearring: bool,
    /// Printed when it passes, else structural when it passes, else none.
    pub selected: Option<GeneralVariant>,
}

/// Runs both variants through the axiom checks and picks one.
pub fn select_general_variant(maps: Arc<MapQuad>, mode: VerifyMode) -> Result<(VariantSelection, Option<AxiomReport>)> {
    let p = maps.p;
    let arith = H1Arith::new(p)?;
    let n = arith.order() as u32;
    let diffs: Vec<(u64, Option<[u32; 2]>)> = (0..n)
        .into_par_iter()
        .map(|xi| {
            let x = arith.element(xi);
            let mut count = 0;
            let mut first = None;
            for yi in 0..n {
                let y = arith.element(yi);
                if mul_general_printed(&arith, &maps, &x, &y) != mul_structural(&arith, &maps, &x, &y) {
                    count += 1;
                    first.get_or_insert([xi, yi]);
                }
            }
            (count, first)
        })
        .collect();
    let disagreements = diffs.iter().map(|d| d.0).sum();
    let first_disagreement = diffs.iter().find_map(|d| d.1);

    let printed = verify_axioms(&build_nearring(maps.clone(), MulKind::General(GeneralVariant::Printed))?, mode);
    let structural = if disagreements == 0 {
        printed.clone()
    } else {
        verify_axioms(&build_nearring(maps, MulKind::General(GeneralVariant::Structural))?, mode)
    };
    let (selected, report) = if printed.is_nearring() {
        (Some(GeneralVariant::Printed), Some(printed.clone()))
    } else if structural.is_nearring() {
        (Some(GeneralVariant::Structural), Some(structural.clone()))
    } else {
        (None, None)
    };
    Ok((
        VariantSelection {
            disagreements,
            first_disagreement,
            printed_is_nearring: printed.is_nearring(),
            structural_is_nearring: structural.is_nearring(),
            selected,
        },
        report,
    ))
}
