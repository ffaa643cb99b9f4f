//! Candidate nearrings and the checks that decide whether they are (local)
//! nearrings with identity.
//!
//! Elements are addressed by their canonical index everywhere. A
//! [`NearringInstance`] pairs an additive group with a multiplication rule
//! and a designated identity; the verifiers materialize dense tables when the
//! order is small enough and fall back to direct evaluation otherwise.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::h1::H1Arith;
use crate::pcgroup::PcPresentation;

/// Largest order for which dense `n x n` tables are built.
pub const DEFAULT_TABLE_CAP: usize = 2401;

/// Largest order for which the subgroup lattice is enumerated.
pub const SUBGROUP_ENUMERATION_CAP: usize = 625;

/// Samples per independently seeded block. Blocks make sampled sweeps
/// independent of the number of worker threads.
const SAMPLE_BLOCK: u64 = 1 << 16;

pub trait AdditiveGroup: Send + Sync {
    fn name(&self) -> String;
    fn prime(&self) -> u32;
    fn order(&self) -> usize;
    fn add(&self, x: u32, y: u32) -> u32;
    fn neg(&self, x: u32) -> u32;

    fn element_order(&self, x: u32) -> u32 {
        let mut acc = x;
        let mut n = 1;
        while acc != 0 {
            acc = self.add(acc, x);
            n += 1;
        }
        n
    }
}

impl AdditiveGroup for H1Arith {
    fn name(&self) -> String {
        format!("h1(p={})", self.prime())
    }

    fn prime(&self) -> u32 {
        H1Arith::prime(self)
    }

    fn order(&self) -> usize {
        H1Arith::order(self)
    }

    fn add(&self, x: u32, y: u32) -> u32 {
        self.index(&H1Arith::add(self, &self.element(x), &self.element(y)))
    }

    fn neg(&self, x: u32) -> u32 {
        self.index(&H1Arith::neg(self, &self.element(x)))
    }
}

impl AdditiveGroup for PcPresentation {
    fn name(&self) -> String {
        PcPresentation::name(self).to_string()
    }

    fn prime(&self) -> u32 {
        PcPresentation::prime(self)
    }

    fn order(&self) -> usize {
        PcPresentation::order(self)
    }

    fn add(&self, x: u32, y: u32) -> u32 {
        self.index(&PcPresentation::add(self, &self.element(x), &self.element(y)))
    }

    fn neg(&self, x: u32) -> u32 {
        self.index(&PcPresentation::neg(self, &self.element(x)))
    }
}

/// A group given by its full Cayley table.
#[derive(Clone, Debug)]
pub struct CayleyGroup {
    name: String,
    p: u32,
    n: usize,
    add: Vec<u32>,
    neg: Vec<u32>,
}

impl CayleyGroup {
    pub fn from_group(g: &dyn AdditiveGroup) -> Result<Self> {
        let n = g.order();
        if n > DEFAULT_TABLE_CAP {
            return Err(Error::CapExceeded { order: n, cap: DEFAULT_TABLE_CAP });
        }
        let add: Vec<u32> = (0..n as u32)
            .into_par_iter()
            .flat_map_iter(|x| (0..n as u32).map(move |y| g.add(x, y)))
            .collect();
        let mut neg = vec![0; n];
        for x in 0..n {
            neg[x] = add[x * n..(x + 1) * n].iter().position(|&s| s == 0).expect("group element without inverse") as u32;
        }
        Ok(CayleyGroup { name: g.name(), p: g.prime(), n, add, neg })
    }

    pub fn table(&self) -> &[u32] {
        &self.add
    }

    /// Exhaustive associativity; returns the first failing triple.
    pub fn associativity_witness(&self) -> Option<(u32, u32, u32)> {
        let n = self.n;
        let t = &self.add;
        (0..n).into_par_iter().find_map_first(|x| {
            let row_x = &t[x * n..(x + 1) * n];
            for y in 0..n {
                let row_xy = &t[row_x[y] as usize * n..][..n];
                let row_y = &t[y * n..(y + 1) * n];
                for z in 0..n {
                    if row_xy[z] != row_x[row_y[z] as usize] {
                        return Some((x as u32, y as u32, z as u32));
                    }
                }
            }
            None
        })
    }

    pub fn exponent(&self) -> u32 {
        (0..self.n as u32).map(|x| self.element_order(x)).max().unwrap_or(1)
    }
}

impl AdditiveGroup for CayleyGroup {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn prime(&self) -> u32 {
        self.p
    }

    fn order(&self) -> usize {
        self.n
    }

    #[inline]
    fn add(&self, x: u32, y: u32) -> u32 {
        self.add[x as usize * self.n + y as usize]
    }

    #[inline]
    fn neg(&self, x: u32) -> u32 {
        self.neg[x as usize]
    }
}

pub trait Multiplication: Send + Sync {
    fn mul(&self, x: u32, y: u32) -> u32;
}

/// Multiplication given by a closure over element indices.
pub struct FnMul<F>(pub F);

impl<F: Fn(u32, u32) -> u32 + Send + Sync> Multiplication for FnMul<F> {
    fn mul(&self, x: u32, y: u32) -> u32 {
        (self.0)(x, y)
    }
}

/// Dense multiplication table, `data[x * n + y] = x * y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MulTable {
    pub p: u32,
    pub n: usize,
    pub identity: u32,
    pub data: Vec<u32>,
}

impl Multiplication for MulTable {
    #[inline]
    fn mul(&self, x: u32, y: u32) -> u32 {
        self.data[x as usize * self.n + y as usize]
    }
}

impl MulTable {
    pub fn row(&self, x: u32) -> &[u32] {
        &self.data[x as usize * self.n..(x as usize + 1) * self.n]
    }

    /// CSV: a header line `p,n,identity_idx` followed by `n` rows of `n`
    /// comma-separated element indices.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{},{},{}", self.p, self.n, self.identity)?;
        let mut line = String::new();
        for x in 0..self.n {
            line.clear();
            for (k, v) in self.row(x as u32).iter().enumerate() {
                if k > 0 {
                    line.push(',');
                }
                line.push_str(&v.to_string());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let bad = |m: String| Error::MalformedTable(m);
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| bad("empty file".into()))??;
        let head: Vec<u64> = header
            .split(',')
            .map(|s| s.trim().parse::<u64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(format!("header: {e}")))?;
        let [p, n, identity] = head[..] else {
            return Err(bad(format!("header has {} fields, expected 3", head.len())));
        };
        let n = n as usize;
        if identity as usize >= n {
            return Err(bad(format!("identity {identity} out of range")));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in 0..n {
            let line = lines.next().ok_or_else(|| bad(format!("missing row {row}")))??;
            let before = data.len();
            for s in line.split(',') {
                let v: u32 = s.trim().parse().map_err(|e| bad(format!("row {row}: {e}")))?;
                if v as usize >= n {
                    return Err(bad(format!("row {row}: entry {v} out of range")));
                }
                data.push(v);
            }
            if data.len() - before != n {
                return Err(bad(format!("row {row} has {} entries, expected {n}", data.len() - before)));
            }
        }
        if lines.any(|l| l.map(|l| !l.trim().is_empty()).unwrap_or(true)) {
            return Err(bad("trailing data after the last row".into()));
        }
        Ok(MulTable { p: p as u32, n, identity: identity as u32, data })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(f)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_csv(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// An additive group, a multiplication rule and a designated identity.
#[derive(Clone)]
pub struct NearringInstance {
    pub group: Arc<dyn AdditiveGroup>,
    pub mul: Arc<dyn Multiplication>,
    pub identity: u32,
}

impl fmt::Debug for NearringInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NearringInstance")
            .field("group", &self.group.name())
            .field("order", &self.group.order())
            .field("identity", &self.identity)
            .finish()
    }
}

impl NearringInstance {
    pub fn new(group: Arc<dyn AdditiveGroup>, mul: Arc<dyn Multiplication>, identity: u32) -> Result<Self> {
        let n = group.order();
        if identity as usize >= n {
            return Err(Error::InvalidElement(format!("identity {identity} out of range")));
        }
        if n > 1 && identity == 0 {
            return Err(Error::InvalidElement("the identity must be nonzero".into()));
        }
        Ok(NearringInstance { group, mul, identity })
    }

    pub fn from_table(group: Arc<dyn AdditiveGroup>, table: MulTable) -> Result<Self> {
        if table.n != group.order() {
            return Err(Error::MalformedTable(format!("table order {} != group order {}", table.n, group.order())));
        }
        let identity = table.identity;
        Self::new(group, Arc::new(table), identity)
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        self.mul.mul(x, y)
    }

    #[inline]
    pub fn add(&self, x: u32, y: u32) -> u32 {
        self.group.add(x, y)
    }

    /// Materializes the multiplication, refusing orders above `cap`.
    pub fn multiplication_table(&self, cap: usize) -> Result<MulTable> {
        let n = self.order();
        if n > cap {
            return Err(Error::CapExceeded { order: n, cap });
        }
        let data: Vec<u32> = (0..n as u32)
            .into_par_iter()
            .flat_map_iter(|x| (0..n as u32).map(move |y| self.mul(x, y)))
            .collect();
        Ok(MulTable { p: self.group.prime(), n, identity: self.identity, data })
    }

    fn dense(&self) -> Option<Dense> {
        let n = self.order();
        if n > DEFAULT_TABLE_CAP {
            return None;
        }
        let group = CayleyGroup::from_group(self.group.as_ref()).ok()?;
        let mul = self.multiplication_table(DEFAULT_TABLE_CAP).ok()?;
        Some(Dense { n, add: group.add, mul: mul.data })
    }
}

/// Element operations used by the sweeps.
trait Ops: Sync {
    fn n(&self) -> usize;
    fn add(&self, x: u32, y: u32) -> u32;
    fn mul(&self, x: u32, y: u32) -> u32;
}

struct Dense {
    n: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
}

impl Ops for Dense {
    fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn add(&self, x: u32, y: u32) -> u32 {
        self.add[x as usize * self.n + y as usize]
    }

    #[inline]
    fn mul(&self, x: u32, y: u32) -> u32 {
        self.mul[x as usize * self.n + y as usize]
    }
}

impl Ops for NearringInstance {
    fn n(&self) -> usize {
        self.order()
    }

    fn add(&self, x: u32, y: u32) -> u32 {
        self.group.add(x, y)
    }

    fn mul(&self, x: u32, y: u32) -> u32 {
        self.mul.mul(x, y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerifyMode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

/// Outcome of one law.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomStatus {
    pub pass: bool,
    pub checks: u64,
    pub failures: u64,
    /// Lowest failing tuple of element indices (sample order in sampled mode).
    pub witness: Option<Vec<u32>>,
}

impl AxiomStatus {
    fn from_tally(t: Tally) -> Self {
        AxiomStatus { pass: t.failures == 0, checks: t.checks, failures: t.failures, witness: t.witness }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub order: usize,
    pub identity: u32,
    pub mode: VerifyMode,
    pub associativity: AxiomStatus,
    pub left_distributivity: AxiomStatus,
    pub left_identity: AxiomStatus,
    pub right_identity: AxiomStatus,
    /// `x * 0 = 0`, a consequence of left distributivity.
    pub right_zero: AxiomStatus,
    /// `0 * x = 0` for all `x`; a property, not an axiom.
    pub zero_symmetric: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl AxiomReport {
    /// All nearring-with-identity axioms hold.
    pub fn is_nearring(&self) -> bool {
        self.associativity.pass
            && self.left_distributivity.pass
            && self.left_identity.pass
            && self.right_identity.pass
            && self.right_zero.pass
    }

    /// First failed law with its witness.
    pub fn first_failure(&self) -> Option<(&'static str, &AxiomStatus)> {
        [
            ("associativity", &self.associativity),
            ("left_distributivity", &self.left_distributivity),
            ("left_identity", &self.left_identity),
            ("right_identity", &self.right_identity),
            ("right_zero", &self.right_zero),
        ]
        .into_iter()
        .find(|(_, s)| !s.pass)
    }
}

#[derive(Clone, Debug, Default)]
struct Tally {
    checks: u64,
    failures: u64,
    witness: Option<Vec<u32>>,
}

impl Tally {
    /// Merge keeping the earlier witness; `self` precedes `other`.
    fn merge(mut self, other: Tally) -> Tally {
        self.checks += other.checks;
        self.failures += other.failures;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
        self
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Vec<u32>) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }
}

/// Exhaustive triple sweep of `law`, parallel over the first coordinate.
fn sweep_triples<O: Ops>(ops: &O, law: impl Fn(&O, u32, u32, u32) -> bool + Sync) -> Tally {
    let n = ops.n() as u32;
    let parts: Vec<Tally> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut t = Tally::default();
            for y in 0..n {
                for z in 0..n {
                    t.record(law(ops, x, y, z), || vec![x, y, z]);
                }
            }
            t
        })
        .collect();
    parts.into_iter().fold(Tally::default(), Tally::merge)
}

/// Seeded random triple sweep; block `b` uses ChaCha stream `b`.
fn sample_triples<O: Ops>(ops: &O, count: u64, seed: u64, law: impl Fn(&O, u32, u32, u32) -> bool + Sync) -> Tally {
    let n = ops.n() as u32;
    let blocks = count.div_ceil(SAMPLE_BLOCK);
    let parts: Vec<Tally> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let len = SAMPLE_BLOCK.min(count - b * SAMPLE_BLOCK);
            let mut t = Tally::default();
            for _ in 0..len {
                let (x, y, z) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                t.record(law(ops, x, y, z), || vec![x, y, z]);
            }
            t
        })
        .collect();
    parts.into_iter().fold(Tally::default(), Tally::merge)
}

pub(crate) fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

fn sweep_elements<O: Ops>(ops: &O, law: impl Fn(&O, u32) -> bool + Sync) -> Tally {
    let n = ops.n() as u32;
    let parts: Vec<Tally> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut t = Tally::default();
            t.record(law(ops, x), || vec![x]);
            t
        })
        .collect();
    parts.into_iter().fold(Tally::default(), Tally::merge)
}

fn assoc<O: Ops>(o: &O, x: u32, y: u32, z: u32) -> bool {
    o.mul(o.mul(x, y), z) == o.mul(x, o.mul(y, z))
}

fn left_dist<O: Ops>(o: &O, x: u32, y: u32, z: u32) -> bool {
    o.mul(x, o.add(y, z)) == o.add(o.mul(x, y), o.mul(x, z))
}

fn verify_with<O: Ops>(ops: &O, identity: u32, mode: VerifyMode) -> AxiomReport {
    let start = Instant::now();
    let (associativity, left_distributivity) = match mode {
        VerifyMode::Exhaustive => (sweep_triples(ops, assoc), sweep_triples(ops, left_dist)),
        VerifyMode::Sampled { count, seed } => {
            // distinct streams for the two laws
            (sample_triples(ops, count, seed, assoc), sample_triples(ops, count, seed ^ 0x9e37_79b9_7f4a_7c15, left_dist))
        }
    };
    let left_identity = sweep_elements(ops, |o, x| o.mul(identity, x) == x);
    let right_identity = sweep_elements(ops, |o, x| o.mul(x, identity) == x);
    let right_zero = sweep_elements(ops, |o, x| o.mul(x, 0) == 0);
    let zero_symmetric = sweep_elements(ops, |o, x| o.mul(0, x) == 0).failures == 0;
    AxiomReport {
        order: ops.n(),
        identity,
        mode,
        associativity: AxiomStatus::from_tally(associativity),
        left_distributivity: AxiomStatus::from_tally(left_distributivity),
        left_identity: AxiomStatus::from_tally(left_identity),
        right_identity: AxiomStatus::from_tally(right_identity),
        right_zero: AxiomStatus::from_tally(right_zero),
        zero_symmetric,
        elapsed: start.elapsed(),
    }
}

/// Checks the nearring-with-identity axioms.
pub fn verify_axioms(nr: &NearringInstance, mode: VerifyMode) -> AxiomReport {
    match nr.dense() {
        Some(d) => verify_with(&d, nr.identity, mode),
        None => verify_with(nr, nr.identity, mode),
    }
}

/// The group operation seen through [`Ops`], so the triple sweeps can test
/// additive associativity.
struct AddOnly<'a, G: ?Sized>(&'a G);

impl<G: AdditiveGroup + ?Sized> Ops for AddOnly<'_, G> {
    fn n(&self) -> usize {
        self.0.order()
    }

    #[inline]
    fn add(&self, x: u32, y: u32) -> u32 {
        self.0.add(x, y)
    }

    #[inline]
    fn mul(&self, x: u32, y: u32) -> u32 {
        self.0.add(x, y)
    }
}

/// Associativity of the group operation itself; uses a Cayley table when
/// the order allows one.
pub fn check_group_associativity(g: &dyn AdditiveGroup, mode: VerifyMode) -> AxiomStatus {
    let dense = if g.order() <= DEFAULT_TABLE_CAP { CayleyGroup::from_group(g).ok() } else { None };
    let tally = match (&dense, mode) {
        (Some(d), VerifyMode::Exhaustive) => sweep_triples(&AddOnly(d), assoc),
        (Some(d), VerifyMode::Sampled { count, seed }) => sample_triples(&AddOnly(d), count, seed, assoc),
        (None, VerifyMode::Exhaustive) => sweep_triples(&AddOnly(g), assoc),
        (None, VerifyMode::Sampled { count, seed }) => sample_triples(&AddOnly(g), count, seed, assoc),
    };
    AxiomStatus::from_tally(tally)
}

/// `(order, count)` pairs, ascending by order.
pub fn element_order_histogram(g: &dyn AdditiveGroup) -> Vec<(u32, usize)> {
    let mut hist = BTreeMap::new();
    for x in 0..g.order() as u32 {
        *hist.entry(g.element_order(x)).or_insert(0) += 1;
    }
    hist.into_iter().collect()
}

/// Units, non-units and the shape of the non-unit set.
#[derive(Clone, Debug, Serialize)]
pub struct LocalStructure {
    #[serde(skip)]
    pub units: Vec<u32>,
    #[serde(skip)]
    pub non_units: Vec<u32>,
    #[serde(skip)]
    pub inverse: Vec<Option<u32>>,
    pub unit_count: usize,
    pub l_order: usize,
    pub l_is_subgroup: bool,
    pub l_divides_order: bool,
    pub l_cyclic: bool,
    pub i_plus_l_is_subgroup_of_units: bool,
    /// Local: the non-units form an additive subgroup.
    pub is_local: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl LocalStructure {
    pub fn is_unit(&self, x: u32) -> bool {
        self.inverse[x as usize].is_some()
    }
}

fn units_with<O: Ops>(ops: &O, identity: u32) -> LocalStructure {
    let start = Instant::now();
    let n = ops.n() as u32;
    // two-sided inverse by scanning row and column
    let inverse: Vec<Option<u32>> = (0..n)
        .into_par_iter()
        .map(|x| (0..n).find(|&y| ops.mul(x, y) == identity && ops.mul(y, x) == identity))
        .collect();
    let units: Vec<u32> = (0..n).filter(|&x| inverse[x as usize].is_some()).collect();
    let non_units: Vec<u32> = (0..n).filter(|&x| inverse[x as usize].is_none()).collect();
    let in_l = |x: u32| inverse[x as usize].is_none();

    let l_is_subgroup = !non_units.is_empty()
        && in_l(0)
        && non_units.par_iter().all(|&x| non_units.iter().all(|&y| in_l(ops.add(x, y))));
    let l_order = non_units.len();
    let l_divides_order = l_order > 0 && (n as usize) % l_order == 0;
    let l_cyclic = l_is_subgroup && non_units.iter().any(|&x| additive_order(ops, x) as usize == l_order);
    let i_plus_l: Vec<u32> = non_units.iter().map(|&m| ops.add(identity, m)).collect();
    let i_plus_l_is_subgroup_of_units = l_is_subgroup
        && i_plus_l.iter().all(|&s| !in_l(s))
        && {
            let members: HashSet<u32> = i_plus_l.iter().copied().collect();
            i_plus_l.par_iter().all(|&s| i_plus_l.iter().all(|&t| members.contains(&ops.mul(s, t))))
        };
    LocalStructure {
        unit_count: units.len(),
        units,
        non_units,
        inverse,
        l_order,
        l_is_subgroup,
        l_divides_order,
        l_cyclic,
        i_plus_l_is_subgroup_of_units,
        is_local: l_is_subgroup,
        elapsed: start.elapsed(),
    }
}

fn additive_order<O: Ops>(ops: &O, x: u32) -> u32 {
    let mut acc = x;
    let mut k = 1;
    while acc != 0 {
        acc = ops.add(acc, x);
        k += 1;
    }
    k
}

/// Computes units by two-sided inverse scan and decides locality.
pub fn units_and_locality(nr: &NearringInstance) -> LocalStructure {
    match nr.dense() {
        Some(d) => units_with(&d, nr.identity),
        None => units_with(nr, nr.identity),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentCheck {
    pub identity_order: u32,
    pub exponent: u32,
    /// Units whose additive order differs from the exponent.
    pub unit_order_mismatches: u64,
    pub witness: Option<u32>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RrSubgroupCheck {
    /// "exhaustive" or "sampled+generators".
    pub method: String,
    pub checks: u64,
    pub pass: bool,
    /// `(x, m, y)` with `x*m*y` outside `L`.
    pub witness: Option<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantSubgroupCheck {
    pub enumerated: bool,
    pub subgroups: usize,
    /// Orders of the proper R*-invariant subgroups, ascending.
    pub invariant_proper_orders: Vec<usize>,
    pub pass: bool,
    /// Elements of an invariant proper subgroup not contained in `L`.
    pub witness: Option<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructuralLemmas {
    pub exponent: ExponentCheck,
    pub rr_subgroup: RrSubgroupCheck,
    pub invariant_subgroups: InvariantSubgroupCheck,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl StructuralLemmas {
    pub fn pass(&self) -> bool {
        self.exponent.pass && self.rr_subgroup.pass && self.invariant_subgroups.pass
    }
}

/// Options for [`check_structural_lemmas`].
#[derive(Clone, Copy, Debug)]
pub struct LemmaOptions {
    /// Exhaustive `(x, m, y)` sweep when `n^2 |L|` stays below this.
    pub exhaustive_budget: u64,
    pub samples: u64,
    pub seed: u64,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        LemmaOptions { exhaustive_budget: 200_000_000, samples: 10_000_000, seed: 0 }
    }
}

fn lemmas_with<O: Ops>(ops: &O, identity: u32, local: &LocalStructure, opts: LemmaOptions) -> StructuralLemmas {
    let start = Instant::now();
    let n = ops.n() as u32;

    // exponent = order of the identity = order of every unit
    let orders: Vec<u32> = (0..n).into_par_iter().map(|x| additive_order(ops, x)).collect();
    let exponent = orders.iter().copied().max().unwrap_or(1);
    let identity_order = orders[identity as usize];
    let bad_units: Vec<u32> = local.units.iter().copied().filter(|&u| orders[u as usize] != exponent).collect();
    let exponent_check = ExponentCheck {
        identity_order,
        exponent,
        unit_order_mismatches: bad_units.len() as u64,
        witness: bad_units.first().copied(),
        pass: identity_order == exponent && bad_units.is_empty(),
    };

    // x * m * y stays in L
    let in_l = |x: u32| local.inverse[x as usize].is_none();
    let l = &local.non_units;
    let work = (n as u64) * (n as u64) * l.len() as u64;
    let rr = if work <= opts.exhaustive_budget {
        let parts: Vec<Tally> = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut t = Tally::default();
                for &m in l {
                    let xm = ops.mul(x, m);
                    for y in 0..n {
                        t.record(in_l(ops.mul(xm, y)), || vec![x, m, y]);
                    }
                }
                t
            })
            .collect();
        let t = parts.into_iter().fold(Tally::default(), Tally::merge);
        RrSubgroupCheck { method: "exhaustive".into(), checks: t.checks, pass: t.failures == 0, witness: t.witness }
    } else {
        let blocks = opts.samples.div_ceil(SAMPLE_BLOCK);
        let sampled = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut rng = block_rng(opts.seed, b);
                let len = SAMPLE_BLOCK.min(opts.samples - b * SAMPLE_BLOCK);
                let mut t = Tally::default();
                for _ in 0..len {
                    let x = rng.gen_range(0..n);
                    let m = l[rng.gen_range(0..l.len())];
                    let y = rng.gen_range(0..n);
                    t.record(in_l(ops.mul(ops.mul(x, m), y)), || vec![x, m, y]);
                }
                t
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(Tally::default(), Tally::merge);
        // (a + b) * y need not distribute, so generators of L do not cover L;
        // this pass only adds exhaustive coverage in x and y.
        let gens = generating_set(ops, l);
        let by_gens = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut t = Tally::default();
                for &m in &gens {
                    let xm = ops.mul(x, m);
                    for y in 0..n {
                        t.record(in_l(ops.mul(xm, y)), || vec![x, m, y]);
                    }
                }
                t
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(Tally::default(), Tally::merge);
        let t = sampled.merge(by_gens);
        RrSubgroupCheck {
            method: "sampled+generators".into(),
            checks: t.checks,
            pass: t.failures == 0,
            witness: t.witness,
        }
    };

    let invariant = if n as usize <= SUBGROUP_ENUMERATION_CAP {
        invariant_subgroups(ops, local)
    } else {
        InvariantSubgroupCheck {
            enumerated: false,
            subgroups: 0,
            invariant_proper_orders: Vec::new(),
            pass: true,
            witness: None,
        }
    };

    StructuralLemmas { exponent: exponent_check, rr_subgroup: rr, invariant_subgroups: invariant, elapsed: start.elapsed() }
}

/// Greedy generating set of the subgroup spanned by `elems`.
fn generating_set<O: Ops>(ops: &O, elems: &[u32]) -> Vec<u32> {
    let mut gens = Vec::new();
    let mut span = FixedBitSet::with_capacity(ops.n());
    span.insert(0);
    for &x in elems {
        if !span.contains(x as usize) {
            gens.push(x);
            span = closure(ops, &gens);
        }
    }
    gens
}

/// Subgroup generated by `gens` (finite, so closing under `+` suffices).
fn closure<O: Ops>(ops: &O, gens: &[u32]) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(ops.n());
    set.insert(0);
    let mut queue = VecDeque::from([0u32]);
    while let Some(x) = queue.pop_front() {
        for &g in gens {
            let y = ops.add(x, g);
            if !set.put(y as usize) {
                queue.push_back(y);
            }
        }
    }
    set
}

/// All subgroups of the additive group, each with a generating set.
fn all_subgroups<O: Ops>(ops: &O) -> Vec<(FixedBitSet, Vec<u32>)> {
    let n = ops.n();
    let trivial = closure(ops, &[]);
    let mut seen: HashSet<FixedBitSet> = HashSet::from([trivial.clone()]);
    let mut out = vec![(trivial, Vec::new())];
    let mut next = 0;
    while next < out.len() {
        let (sub, gens) = out[next].clone();
        next += 1;
        let members: Vec<u32> = sub.ones().map(|x| x as u32).collect();
        // <S, g> only depends on the coset g + S
        let mut covered = sub.clone();
        for g in 0..n as u32 {
            if covered.contains(g as usize) {
                continue;
            }
            for &s in &members {
                covered.insert(ops.add(g, s) as usize);
            }
            let mut new_gens = gens.clone();
            new_gens.push(g);
            let bigger = closure(ops, &new_gens);
            if seen.insert(bigger.clone()) {
                out.push((bigger, new_gens));
            }
        }
    }
    out
}

fn invariant_subgroups<O: Ops>(ops: &O, local: &LocalStructure) -> InvariantSubgroupCheck {
    let n = ops.n();
    let subgroups = all_subgroups(ops);
    let mut orders = Vec::new();
    let mut witness = None;
    for (set, gens) in &subgroups {
        let size = set.count_ones(..);
        if size == n {
            continue;
        }
        // x -> r*x is an endomorphism, so checking generators suffices
        let invariant = local.units.iter().all(|&r| gens.iter().all(|&g| set.contains(ops.mul(r, g) as usize)));
        if !invariant {
            continue;
        }
        orders.push(size);
        if witness.is_none() {
            let outside: Vec<u32> =
                set.ones().map(|x| x as u32).filter(|&x| local.inverse[x as usize].is_some()).collect();
            if !outside.is_empty() {
                witness = Some(outside);
            }
        }
    }
    orders.sort_unstable();
    InvariantSubgroupCheck {
        enumerated: true,
        subgroups: subgroups.len(),
        invariant_proper_orders: orders,
        pass: witness.is_none(),
        witness,
    }
}

/// Checks the exponent, `(R,R)`-subgroup and invariant-subgroup properties
/// of a local nearring.
pub fn check_structural_lemmas(nr: &NearringInstance, local: &LocalStructure, opts: LemmaOptions) -> StructuralLemmas {
    match nr.dense() {
        Some(d) => lemmas_with(&d, nr.identity, local, opts),
        None => lemmas_with(nr, nr.identity, local, opts),
    }
}

/// The report written by the CLI; timing data is kept apart so reports can
/// be compared byte for byte.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub group: String,
    pub p: u32,
    pub order: usize,
    pub identity: u32,
    pub axioms: AxiomReport,
    pub units: UnitSummary,
    pub locality: Option<LocalStructure>,
    pub lemmas: Option<StructuralLemmas>,
    pub timings: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitSummary {
    pub count: usize,
    pub non_units: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcgroup::{build_presentation, GroupId};

    /// `Z/16` on the cyclic group with the pc indexing.
    fn z16() -> (Arc<dyn AdditiveGroup>, Vec<u32>, Vec<u32>) {
        let g = build_presentation(GroupId::C16).unwrap();
        // residue of each index and index of each residue
        let residue: Vec<u32> = (0..16).map(|i| {
            let c = g.element(i);
            c.0[0] + 2 * c.0[1] + 4 * c.0[2] + 8 * c.0[3]
        }).collect();
        let mut index = vec![0; 16];
        for (i, &r) in residue.iter().enumerate() {
            index[r as usize] = i as u32;
        }
        (Arc::new(g), residue, index)
    }

    fn z16_ring() -> NearringInstance {
        let (g, residue, index) = z16();
        let mul = FnMul(move |x: u32, y: u32| index[((residue[x as usize] * residue[y as usize]) % 16) as usize]);
        let one = z16().2[1];
        NearringInstance::new(g, Arc::new(mul), one).unwrap()
    }

    #[test]
    fn z16_is_a_local_ring() {
        let nr = z16_ring();
        let rep = verify_axioms(&nr, VerifyMode::Exhaustive);
        assert!(rep.is_nearring(), "{rep:?}");
        assert!(rep.zero_symmetric);
        assert_eq!(rep.associativity.checks, 16 * 16 * 16);
        let loc = units_and_locality(&nr);
        assert!(loc.is_local && loc.l_cyclic && loc.i_plus_l_is_subgroup_of_units);
        assert_eq!(loc.l_order, 8);
        let (_, residue, _) = z16();
        let mut units: Vec<u32> = loc.units.iter().map(|&u| residue[u as usize]).collect();
        units.sort();
        assert_eq!(units, vec![1, 3, 5, 7, 9, 11, 13, 15]);
        let lem = check_structural_lemmas(&nr, &loc, LemmaOptions::default());
        assert!(lem.pass());
        assert_eq!(lem.exponent.exponent, 16);
        assert_eq!(lem.invariant_subgroups.invariant_proper_orders, vec![1, 2, 4, 8]);
        assert_eq!(lem.invariant_subgroups.subgroups, 5);
    }

    #[test]
    fn z16_table_matches_residues() {
        let nr = z16_ring();
        let t = nr.multiplication_table(DEFAULT_TABLE_CAP).unwrap();
        let (_, residue, _) = z16();
        for x in 0..16u32 {
            for y in 0..16u32 {
                assert_eq!(residue[t.mul(x, y) as usize], residue[x as usize] * residue[y as usize] % 16);
            }
        }
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"2,16,"));
        assert_eq!(MulTable::read_csv(&buf[..]).unwrap(), t);
        assert!(matches!(nr.multiplication_table(8), Err(Error::CapExceeded { order: 16, cap: 8 })));
    }

    #[test]
    fn left_projection_fails_identity() {
        // x*y := x, with a designated identity: x*i = x holds, i*x = x does not
        let (g, _, index) = z16();
        let i = index[1];
        let nr = NearringInstance::new(g, Arc::new(FnMul(|x: u32, _y: u32| x)), i).unwrap();
        let rep = verify_axioms(&nr, VerifyMode::Exhaustive);
        assert!(rep.right_identity.pass);
        assert!(!rep.left_identity.pass);
        let w = rep.left_identity.witness.clone().unwrap();
        assert_ne!(w[0], i);
        assert!(!rep.is_nearring());
        assert_eq!(rep.first_failure().unwrap().0, "left_distributivity");
    }

    #[test]
    fn sampled_is_deterministic() {
        let nr = z16_ring();
        let a = verify_axioms(&nr, VerifyMode::Sampled { count: 100_000, seed: 7 });
        let b = verify_axioms(&nr, VerifyMode::Sampled { count: 100_000, seed: 7 });
        assert_eq!(a.associativity, b.associativity);
        assert_eq!(a.associativity.checks, 100_000);
        assert!(a.is_nearring());
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(MulTable::read_csv(&b""[..]).is_err());
        assert!(MulTable::read_csv(&b"2,2\n"[..]).is_err());
        assert!(MulTable::read_csv(&b"2,2,1\n0,0\n0\n"[..]).is_err());
        assert!(MulTable::read_csv(&b"2,2,1\n0,0\n0,5\n"[..]).is_err());
        assert!(MulTable::read_csv(&b"2,2,1\n0,0\n0,1\n"[..]).is_ok());
    }

    #[test]
    fn identity_must_be_nonzero() {
        let (g, _, _) = z16();
        assert!(NearringInstance::new(g, Arc::new(FnMul(|_, _| 0)), 0).is_err());
    }
}
