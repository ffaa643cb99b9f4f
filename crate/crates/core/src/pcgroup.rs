//! Finite p-groups given by power-commutator presentations.
//!
//! Elements are stored in normal form `g1^e1 g2^e2 ... gn^en` (written
//! additively as `e1*g1 + ... + en*gn`) with every exponent in `[0, p)`.
//! Products are brought back to normal form by collection, using
//!
//! * power rules `p*g_i = w_i` with `w_i` a word in `g_{i+1}, ...`, and
//! * conjugation rules `g_j + g_i = g_i + g_j + t_{ij}` for `j > i`, with
//!   the tail `t_{ij}` a word in `g_{j+1}, ...`.
//!
//! This arithmetic is slow compared to the closed forms in [`crate::h1`] but
//! it is generic, and every closed form in the crate is checked against it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::is_prime;

/// Upper bound on the number of polycyclic generators.
pub const MAX_GENS: usize = 4;

/// Exponent vector of an element in normal form.
///
/// Unused trailing entries (for presentations with fewer than four
/// generators) are always zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coordinates(pub [u32; MAX_GENS]);

impl Coordinates {
    pub const ZERO: Coordinates = Coordinates([0; MAX_GENS]);

    pub const fn new(x1: u32, x2: u32, x3: u32, x4: u32) -> Self {
        Coordinates([x1, x2, x3, x4])
    }

    /// The `i`-th generator (0-based).
    pub fn generator(i: usize) -> Self {
        let mut c = Coordinates::ZERO;
        c.0[i] = 1;
        c
    }

    /// Canonical index `x1*p^3 + x2*p^2 + x3*p + x4` (for four generators).
    pub fn index(&self, p: u32, ngens: usize) -> u32 {
        self.0[..ngens].iter().fold(0, |acc, &e| acc * p + e)
    }

    pub fn from_index(mut idx: u32, p: u32, ngens: usize) -> Self {
        let mut c = Coordinates::ZERO;
        for slot in c.0[..ngens].iter_mut().rev() {
            *slot = idx % p;
            idx /= p;
        }
        c
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl fmt::Display for Coordinates {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// The groups this crate knows how to present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupId {
    /// Exponent p, class 3: `(C_p x C_p x C_p) : C_p`, p > 3.
    H1(u32),
    /// `a^(p^2) = b^p = [a,b]^p = [b,[a,b]] = 1`, `[a,[a,b]] = a^p`, p > 3.
    H2(u32),
    /// `a^(p^2) = b^p = [a,b]^p = [a,[a,b]] = 1`, `[b,[a,b]] = a^p`, p > 3.
    H3(u32),
    /// `a^(p^2) = b^p = [a,b]^p = [a,[a,b]] = 1`, `[b,[a,b]] = a^(2p)`, p > 3.
    H4(u32),
    /// Dihedral group of order 16, SmallGroup [16,7].
    D16,
    /// Semidihedral group of order 16, [16,8].
    QD16,
    /// Generalized quaternion group of order 16, [16,9].
    Q16,
    /// Cyclic group of order 16.
    C16,
    /// Class-3 groups of order 81, `G81(7)` .. `G81(10)` for [81,7] .. [81,10].
    G81(u8),
}

impl GroupId {
    /// Parses a CLI group name; `p` is only consulted for `h1`..`h4`.
    pub fn parse(name: &str, p: Option<u32>) -> Result<Self> {
        let needs_p = || p.ok_or_else(|| Error::Usage(format!("group '{name}' requires --p")));
        let id = match name.to_ascii_lowercase().as_str() {
            "h1" => GroupId::H1(needs_p()?),
            "h2" => GroupId::H2(needs_p()?),
            "h3" => GroupId::H3(needs_p()?),
            "h4" => GroupId::H4(needs_p()?),
            "d16" => GroupId::D16,
            "qd16" => GroupId::QD16,
            "q16" => GroupId::Q16,
            "c16" => GroupId::C16,
            "g81-7" => GroupId::G81(7),
            "g81-8" => GroupId::G81(8),
            "g81-9" => GroupId::G81(9),
            "g81-10" => GroupId::G81(10),
            _ => return Err(Error::UnknownGroup(name.to_string())),
        };
        Ok(id)
    }

    pub fn name(&self) -> String {
        match self {
            GroupId::H1(p) => format!("h1(p={p})"),
            GroupId::H2(p) => format!("h2(p={p})"),
            GroupId::H3(p) => format!("h3(p={p})"),
            GroupId::H4(p) => format!("h4(p={p})"),
            GroupId::D16 => "d16".into(),
            GroupId::QD16 => "qd16".into(),
            GroupId::Q16 => "q16".into(),
            GroupId::C16 => "c16".into(),
            GroupId::G81(k) => format!("g81-{k}"),
        }
    }

    pub fn is_order81(&self) -> bool {
        matches!(self, GroupId::G81(_))
    }
}

impl FromStr for GroupId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupId::parse(s, None)
    }
}

/// A power-commutator presentation on at most four generators, each of
/// relative order `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PcPresentation {
    name: String,
    p: u32,
    ngens: usize,
    /// `power_rules[i]` is the normal form of `p * g_i`.
    power_rules: Vec<Coordinates>,
    /// `comm_rules[j][i]` (for `i < j`) is the tail `t` with
    /// `g_j + g_i = g_i + g_j + t`.
    comm_rules: Vec<Vec<Coordinates>>,
}

impl PcPresentation {
    /// Builds a presentation from explicit rules.
    ///
    /// `comm_rules` lists `(j, i, tail)` for `j > i`; unlisted pairs commute.
    pub fn new(
        name: impl Into<String>,
        p: u32,
        power_rules: Vec<Coordinates>,
        comm_rules: &[(usize, usize, Coordinates)],
    ) -> Result<Self> {
        let ngens = power_rules.len();
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if ngens == 0 || ngens > MAX_GENS {
            return Err(Error::InvalidPresentation(format!("{ngens} generators (need 1..={MAX_GENS})")));
        }
        let check_word = |w: &Coordinates, above: usize, what: &str| -> Result<()> {
            for (k, &e) in w.0.iter().enumerate() {
                if e >= p {
                    return Err(Error::InvalidPresentation(format!("{what}: exponent {e} not reduced mod {p}")));
                }
                if e != 0 && (k <= above || k >= ngens) {
                    return Err(Error::InvalidPresentation(format!(
                        "{what}: word {w} mentions generator {} (must be > {})",
                        k + 1,
                        above + 1
                    )));
                }
            }
            Ok(())
        };
        for (i, w) in power_rules.iter().enumerate() {
            check_word(w, i, &format!("power rule of g{}", i + 1))?;
        }
        let mut table = vec![vec![Coordinates::ZERO; ngens]; ngens];
        for &(j, i, tail) in comm_rules {
            if !(i < j && j < ngens) {
                return Err(Error::InvalidPresentation(format!("commutator rule ({j},{i}) needs i < j < ngens")));
            }
            check_word(&tail, j, &format!("tail of g{} + g{}", j + 1, i + 1))?;
            table[j][i] = tail;
        }
        Ok(PcPresentation { name: name.into(), p, ngens, power_rules, comm_rules: table })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn order(&self) -> usize {
        (self.p as usize).pow(self.ngens as u32)
    }

    pub fn power_rule(&self, i: usize) -> Coordinates {
        self.power_rules[i]
    }

    /// Tail `t` of `g_j + g_i = g_i + g_j + t`, `i < j`.
    pub fn comm_rule(&self, j: usize, i: usize) -> Coordinates {
        self.comm_rules[j][i]
    }

    pub fn index(&self, x: &Coordinates) -> u32 {
        x.index(self.p, self.ngens)
    }

    pub fn element(&self, idx: u32) -> Coordinates {
        Coordinates::from_index(idx, self.p, self.ngens)
    }

    /// All elements in canonical index order.
    pub fn elements(&self) -> impl Iterator<Item = Coordinates> + '_ {
        (0..self.order() as u32).map(move |i| self.element(i))
    }

    fn is_valid(&self, x: &Coordinates) -> bool {
        x.0.iter().enumerate().all(|(k, &e)| if k < self.ngens { e < self.p } else { e == 0 })
    }

    pub fn check(&self, x: &Coordinates) -> Result<()> {
        if self.is_valid(x) {
            Ok(())
        } else {
            Err(Error::InvalidElement(format!("{x} is not a normal form over {}", self.name)))
        }
    }

    /// Right-multiplies the normal form `v` by the generator `g_i`.
    fn collect_generator(&self, v: &mut [u32; MAX_GENS], i: usize) {
        let mut suffix = [0u32; MAX_GENS];
        for j in i + 1..self.ngens {
            suffix[j] = std::mem::take(&mut v[j]);
        }
        v[i] += 1;
        if v[i] == self.p {
            v[i] = 0;
            self.collect_word(v, &self.power_rules[i]);
        }
        // suffix + g_i = g_i + (suffix conjugated by g_i), and conjugation
        // sends g_j to g_j + t_{ji}.
        for j in i + 1..self.ngens {
            for _ in 0..suffix[j] {
                self.collect_generator(v, j);
                self.collect_word(v, &self.comm_rules[j][i]);
            }
        }
    }

    fn collect_word(&self, v: &mut [u32; MAX_GENS], w: &Coordinates) {
        for j in 0..self.ngens {
            for _ in 0..w.0[j] {
                self.collect_generator(v, j);
            }
        }
    }

    /// Normal form of `x + y`.
    pub fn add(&self, x: &Coordinates, y: &Coordinates) -> Coordinates {
        let mut v = x.0;
        self.collect_word(&mut v, y);
        Coordinates(v)
    }

    /// Additive inverse, solved one coordinate at a time.
    pub fn neg(&self, x: &Coordinates) -> Coordinates {
        let mut y = Coordinates::ZERO;
        for i in 0..self.ngens {
            let s = self.add(x, &y);
            debug_assert!(s.0[..i].iter().all(|&e| e == 0));
            y.0[i] = (self.p - s.0[i]) % self.p;
        }
        y
    }

    /// `x` added to itself `r` times; negative `r` means `-(|r| * x)`.
    pub fn smul(&self, x: &Coordinates, r: i64) -> Coordinates {
        if r < 0 {
            return self.neg(&self.smul(x, -r));
        }
        // The exponent divides the group order, so reduce first.
        let mut r = (r as u64) % self.order() as u64;
        let mut acc = Coordinates::ZERO;
        let mut base = *x;
        while r > 0 {
            if r & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            r >>= 1;
        }
        acc
    }

    /// Commutator `-x - y + x + y`.
    pub fn commutator(&self, x: &Coordinates, y: &Coordinates) -> Coordinates {
        let nx = self.neg(x);
        let ny = self.neg(y);
        self.add(&self.add(&nx, &ny), &self.add(x, y))
    }

    /// Smallest `n >= 1` with `n * x = 0`.
    pub fn element_order(&self, x: &Coordinates) -> u32 {
        let mut acc = *x;
        let mut n = 1;
        while !acc.is_zero() {
            acc = self.add(&acc, x);
            n += 1;
        }
        n
    }

    /// Least common multiple of all element orders. For a p-group this is
    /// the largest element order.
    pub fn exponent(&self) -> u32 {
        self.elements().map(|x| self.element_order(&x)).max().unwrap_or(1)
    }
}

/// Builds the presentation of a named group.
///
/// All presentations use four generators. For the `H` groups with `p > 3`
/// the generators are `a, b, c = -a-b+a+b` and a fourth one (`d = -a-c+a+c`
/// for `H1`, `a*p` for `H2`..`H4`). Multiplicative relations `[x,y] = z`
/// read `-x-y+x+y = z`, hence `y + x = x + y - z`.
pub fn build_presentation(id: GroupId) -> Result<PcPresentation> {
    let z = Coordinates::ZERO;
    let g = Coordinates::generator;
    // `k * g_i` as a word
    let gk = |i: usize, k: u32| {
        let mut c = Coordinates::ZERO;
        c.0[i] = k;
        c
    };
    let big_prime = |p: u32| -> Result<u32> {
        if !is_prime(p) {
            Err(Error::NotPrime(p))
        } else if p <= 3 {
            Err(Error::PrimeTooSmall(p))
        } else {
            Ok(p)
        }
    };
    match id {
        GroupId::H1(p) => {
            let p = big_prime(p)?;
            h1_like(id.name(), p)
        }
        GroupId::H2(p) => {
            let p = big_prime(p)?;
            // b + a = a + b - c ; c + a = a + c - a*p ; a*p central
            PcPresentation::new(
                id.name(),
                p,
                vec![g(3), z, z, z],
                &[(1, 0, gk(2, p - 1)), (2, 0, gk(3, p - 1))],
            )
        }
        GroupId::H3(p) => {
            let p = big_prime(p)?;
            // b + a = a + b - c ; c + b = b + c - a*p
            PcPresentation::new(
                id.name(),
                p,
                vec![g(3), z, z, z],
                &[(1, 0, gk(2, p - 1)), (2, 1, gk(3, p - 1))],
            )
        }
        GroupId::H4(p) => {
            let p = big_prime(p)?;
            // b + a = a + b - c ; c + b = b + c - 2*(a*p)
            PcPresentation::new(
                id.name(),
                p,
                vec![g(3), z, z, z],
                &[(1, 0, gk(2, p - 1)), (2, 1, gk(3, p - 2))],
            )
        }
        // Generators s, r, 2r, 4r with 8r = 0 (rotations written additively).
        GroupId::D16 => PcPresentation::new(
            id.name(),
            2,
            vec![z, g(2), g(3), z],
            // r + s = s - r = s + r + 2r + 4r ; 2r + s = s + 2r + 4r
            &[(1, 0, Coordinates::new(0, 0, 1, 1)), (2, 0, g(3))],
        ),
        GroupId::QD16 => PcPresentation::new(
            id.name(),
            2,
            vec![z, g(2), g(3), z],
            // r + s = s + 3r ; 2r + s = s + 6r = s + 2r + 4r
            &[(1, 0, g(2)), (2, 0, g(3))],
        ),
        GroupId::Q16 => PcPresentation::new(
            id.name(),
            2,
            // 2s = 4r
            vec![g(3), g(2), g(3), z],
            &[(1, 0, Coordinates::new(0, 0, 1, 1)), (2, 0, g(3))],
        ),
        GroupId::C16 => PcPresentation::new(id.name(), 2, vec![g(1), g(2), g(3), z], &[]),
        GroupId::G81(7) => h1_like(id.name(), 3),
        // The remaining three share `b + a = a + b - c`, `c + b = b + c + e4`
        // and `[a,c] = 0`; they differ in the power rules. The labels follow
        // the count of elements of order 3 (26, 62 and 8 respectively).
        GroupId::G81(8) => g81_family(id.name(), [g(3), z]),
        GroupId::G81(9) => g81_family(id.name(), [gk(3, 2), z]),
        GroupId::G81(10) => g81_family(id.name(), [gk(3, 2), g(3)]),
        GroupId::G81(k) => Err(Error::UnknownGroup(format!("g81-{k}"))),
    }
}

fn g81_family(name: String, powers: [Coordinates; 2]) -> Result<PcPresentation> {
    let z = Coordinates::ZERO;
    PcPresentation::new(
        name,
        3,
        vec![powers[0], powers[1], z, z],
        &[(1, 0, Coordinates::new(0, 0, 2, 0)), (2, 1, Coordinates::generator(3))],
    )
}

/// `b + a = a + b - c`, `c + a = a + c - d`, everything else commutes and
/// all generators have order `p`.
fn h1_like(name: String, p: u32) -> Result<PcPresentation> {
    let z = Coordinates::ZERO;
    let mut minus_c = z;
    minus_c.0[2] = p - 1;
    let mut minus_d = z;
    minus_d.0[3] = p - 1;
    PcPresentation::new(name, p, vec![z; 4], &[(1, 0, minus_c), (2, 0, minus_d)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h1(p: u32) -> PcPresentation {
        build_presentation(GroupId::H1(p)).unwrap()
    }

    #[test]
    fn index_roundtrip() {
        for idx in 0..625 {
            let c = Coordinates::from_index(idx, 5, 4);
            assert_eq!(c.index(5, 4), idx);
        }
        assert_eq!(Coordinates::new(1, 0, 0, 0).index(5, 4), 125);
        assert_eq!(Coordinates::new(0, 0, 0, 1).index(5, 4), 1);
    }

    #[test]
    fn h1_basic_relations() {
        let g = h1(5);
        let a = Coordinates::generator(0);
        let b = Coordinates::generator(1);
        let c = Coordinates::generator(2);
        let d = Coordinates::generator(3);
        assert_eq!(g.add(&b, &a), Coordinates::new(1, 1, 4, 0));
        assert_eq!(g.add(&c, &a), Coordinates::new(1, 0, 1, 4));
        assert_eq!(g.commutator(&a, &b), c);
        assert_eq!(g.commutator(&a, &c), d);
        assert_eq!(g.add(&Coordinates::ZERO, &b), b);
        for x in [b, c, d] {
            assert_eq!(g.add(&x, &d), g.add(&d, &x));
        }
        assert_eq!(g.add(&b, &c), g.add(&c, &b));
    }

    #[test]
    fn h1_rules_shape() {
        let g = h1(5);
        assert_eq!(g.ngens(), 4);
        assert!((0..4).all(|i| g.power_rule(i).is_zero()));
        assert_eq!(g.comm_rule(1, 0), Coordinates::new(0, 0, 4, 0));
        assert_eq!(g.comm_rule(2, 0), Coordinates::new(0, 0, 0, 4));
        assert!(g.comm_rule(2, 1).is_zero());
        assert!(g.comm_rule(3, 0).is_zero() && g.comm_rule(3, 1).is_zero() && g.comm_rule(3, 2).is_zero());
        assert_eq!(g.elements().count(), 625);
    }

    #[test]
    fn neg_and_smul() {
        let g = h1(5);
        assert_eq!(g.neg(&Coordinates::ZERO), Coordinates::ZERO);
        for x in g.elements() {
            assert!(g.add(&g.neg(&x), &x).is_zero());
            assert!(g.add(&x, &g.neg(&x)).is_zero());
            assert!(g.smul(&x, 5).is_zero());
            assert_eq!(g.smul(&x, -2), g.neg(&g.smul(&x, 2)));
        }
        let x = Coordinates::new(1, 1, 0, 0);
        assert_eq!(g.smul(&x, 2), g.add(&x, &x));
    }

    #[test]
    fn orders_and_exponents() {
        let g = h1(5);
        assert_eq!(g.element_order(&Coordinates::ZERO), 1);
        assert_eq!(g.exponent(), 5);
        assert_eq!(build_presentation(GroupId::D16).unwrap().exponent(), 8);
        assert_eq!(build_presentation(GroupId::C16).unwrap().exponent(), 16);
    }

    #[test]
    fn h1_d_is_central() {
        let g = h1(5);
        let d = Coordinates::generator(3);
        assert!(!d.is_zero());
        for i in 0..4 {
            let x = Coordinates::generator(i);
            assert_eq!(g.add(&x, &d), g.add(&d, &x));
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(build_presentation(GroupId::H1(4)), Err(Error::NotPrime(4))));
        assert!(matches!(build_presentation(GroupId::H2(3)), Err(Error::PrimeTooSmall(3))));
        assert!(matches!(build_presentation(GroupId::G81(11)), Err(Error::UnknownGroup(_))));
        assert!(matches!(GroupId::parse("h9", Some(5)), Err(Error::UnknownGroup(_))));
        assert!(matches!(GroupId::parse("h1", None), Err(Error::Usage(_))));
        // tail mentioning a lower generator
        let bad = PcPresentation::new("bad", 5, vec![Coordinates::ZERO; 4], &[(2, 0, Coordinates::new(0, 1, 0, 0))]);
        assert!(bad.is_err());
    }
}
