//! Finite-horizon encodings of an injection's range as trees, sequences and
//! functions, with the matching decoders.
//!
//! "Range" always means `{f(k) : k < H}` for the table's horizon H.

use crate::bits::{pair, unpair, BitString};
use crate::construct::baire::{baire_intersect, OpenCode};
use crate::construct::dmmin::{dense_monotone_min, DensityTarget, MonotoneFn};
use crate::dag::DagCode;
use crate::error::{Error, Result};
use crate::trees::{tree_from_separable, Generator, SeparableSequence, TreeSource};
use crate::weights::{AlgebraicWeight, Dyadic};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Arc;

/// f(0), ..., f(H−1), pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct InjectionTable {
    values: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl InjectionTable {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        let mut index = HashMap::with_capacity(values.len());
        for (k, &v) in values.iter().enumerate() {
            if index.insert(v, k).is_some() {
                return Err(Error::InvalidArgument(format!("injection repeats the value {v}")));
            }
        }
        Ok(InjectionTable { values, index })
    }

    pub fn identity(h: usize) -> Self {
        Self::new((0..h as u64).collect()).expect("distinct")
    }

    pub fn doubling(h: usize) -> Self {
        Self::new((0..h as u64).map(|k| 2 * k).collect()).expect("distinct")
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn in_range(&self, n: u64) -> bool {
        self.index.contains_key(&n)
    }

    /// Some k < min(limit, H) has f(k) = n.
    pub fn witness_below(&self, n: u64, limit: usize) -> bool {
        self.index.get(&n).is_some_and(|&k| k < limit)
    }
}

impl TryFrom<Vec<u64>> for InjectionTable {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<InjectionTable> for Vec<u64> {
    fn from(t: InjectionTable) -> Vec<u64> {
        t.values
    }
}

/// τ_n = 0^n 1.
pub fn tau(n: u32) -> BitString {
    let mut s = BitString::zeros(n as usize);
    s.push(true);
    s
}

/// σ is all zeros, or σ ⊇ τ_n with no witness for n below |σ|.
#[derive(Clone, Debug)]
pub struct RangeTauTree {
    pub table: Arc<InjectionTable>,
}

impl TreeSource for RangeTauTree {
    fn member(&self, s: &BitString) -> bool {
        match s.first_one() {
            None => true,
            Some(n) => !self.table.witness_below(n as u64, s.len()),
        }
    }

    fn extendible(&self, s: &BitString) -> Option<bool> {
        Some(match s.first_one() {
            None => true,
            Some(n) => !self.table.witness_below(n as u64, self.table.horizon()),
        })
    }

    fn node_class(&self, s: &BitString) -> Option<u64> {
        Some(s.first_one().map_or(0, |n| n as u64 + 1))
    }
}

/// Every column ⟨σ⟩_n holding a 0 has no witness for n below |σ|.
#[derive(Clone, Debug)]
pub struct BctcColumnTree {
    pub table: Arc<InjectionTable>,
}

impl BctcColumnTree {
    fn zeros_clear(&self, s: &BitString, limit: usize) -> bool {
        s.bits()
            .iter()
            .enumerate()
            .filter(|(_, &b)| !b)
            .all(|(i, _)| !self.table.witness_below(unpair(i as u64).0, limit))
    }

    /// σ ∈ V_n: a witness for n below |σ|, or a 0 in ⟨σ⟩_n.
    pub fn open(&self, n: u64, s: &BitString) -> bool {
        self.table.witness_below(n, s.len()) || column_has_zero(s, n)
    }
}

pub fn column_has_zero(s: &BitString, n: u64) -> bool {
    (0u64..)
        .map(|m| pair(n, m))
        .take_while(|&p| p < s.len() as u64)
        .any(|p| !s.bit(p as usize))
}

impl TreeSource for BctcColumnTree {
    fn member(&self, s: &BitString) -> bool {
        self.zeros_clear(s, s.len())
    }

    fn extendible(&self, s: &BitString) -> Option<bool> {
        Some(self.zeros_clear(s, self.table.horizon()))
    }
}

/// σ(n) = 0 only where n has no witness below |σ|.
#[derive(Clone, Debug)]
pub struct SmminTree {
    pub table: Arc<InjectionTable>,
}

impl SmminTree {
    fn zeros_clear(&self, s: &BitString, limit: usize) -> bool {
        s.bits().iter().enumerate().all(|(n, &b)| b || !self.table.witness_below(n as u64, limit))
    }

    /// A[σ]: positions n < |σ| holding 0, or holding 1 with a witness below |σ|.
    pub fn settled(&self, s: &BitString) -> Vec<u32> {
        (0..s.len())
            .filter(|&n| !s.bit(n) || self.table.witness_below(n as u64, s.len()))
            .map(|n| n as u32)
            .collect()
    }

    /// f̃(σ) = 1 − Σ_{n ∈ A[σ]} 2^{-n-1}.
    pub fn value(&self, s: &BitString) -> Dyadic {
        self.settled(s)
            .into_iter()
            .fold(Dyadic::one(), |acc, n| &acc - &Dyadic::pow2_neg(n + 1))
    }
}

impl TreeSource for SmminTree {
    fn member(&self, s: &BitString) -> bool {
        self.zeros_clear(s, s.len())
    }

    fn extendible(&self, s: &BitString) -> Option<bool> {
        Some(self.zeros_clear(s, self.table.horizon()))
    }
}

/// 1 on ⟨⟩ and all-zero strings, otherwise 2^{-k} for the first 1 at k.
pub fn eval_counterexample(sigma: &BitString) -> AlgebraicWeight {
    match sigma.first_one() {
        None => AlgebraicWeight::one(),
        Some(k) => AlgebraicWeight::from_dyadic(Dyadic::pow2_neg(k as u32)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GadgetKind {
    RangeTauTree,
    SeparableRange,
    BctcColumn,
    SMMin,
    NonRealizedInf,
}

impl GadgetKind {
    pub const ALL: [GadgetKind; 5] = [
        GadgetKind::RangeTauTree,
        GadgetKind::SeparableRange,
        GadgetKind::BctcColumn,
        GadgetKind::SMMin,
        GadgetKind::NonRealizedInf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::RangeTauTree => "range-tau-tree",
            GadgetKind::SeparableRange => "separable-range",
            GadgetKind::BctcColumn => "bctc-column",
            GadgetKind::SMMin => "smmin",
            GadgetKind::NonRealizedInf => "non-realized-inf",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        GadgetKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown gadget kind {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetInstance {
    pub kind: GadgetKind,
    pub table: InjectionTable,
    pub depth: u32,
    /// Tree through `depth`, where the gadget has a finite one.
    pub tree: Option<DagCode>,
    /// Heads of eventually-zero sequences.
    pub sequence: Option<Vec<BitString>>,
    /// Path produced by the category or minimization search.
    pub path: Option<BitString>,
    pub stand_in: Option<String>,
}

fn separable_range_sequence(table: &InjectionTable) -> SeparableSequence {
    let generators = table
        .values()
        .iter()
        .map(|&v| {
            let mut head = BitString::zeros(v as usize);
            head.push(true);
            Generator::eventually_zero(head)
        })
        .collect();
    SeparableSequence { generators }
}

fn smmin_greedy(tree: &SmminTree, prefix: &BitString, eps: &AlgebraicWeight, max_len: usize) -> Option<BitString> {
    let mut t = prefix.clone();
    while t.len() < max_len {
        let zero = t.child(false);
        t = if tree.extendible(&zero) == Some(true) { zero } else { t.child(true) };
        if AlgebraicWeight::from_dyadic(tree.value(&t)) < *eps {
            return Some(t);
        }
    }
    None
}

/// Materialize the gadget for `table` through `depth` (at least the horizon).
pub fn build_gadget(kind: GadgetKind, table: &InjectionTable, depth: u32) -> Result<GadgetInstance> {
    let h = table.horizon();
    let depth = depth.max(h as u32);
    let shared = Arc::new(table.clone());
    let mut g = GadgetInstance {
        kind,
        table: table.clone(),
        depth,
        tree: None,
        sequence: None,
        path: None,
        stand_in: None,
    };
    match kind {
        GadgetKind::RangeTauTree => {
            let t = RangeTauTree { table: shared };
            g.tree = Some(DagCode::ambient(&t, depth, false)?);
            let mut seq = vec![BitString::empty()];
            for n in 0..h as u32 {
                let tn = tau(n);
                if t.extendible(&tn) == Some(true) {
                    seq.push(tn);
                }
            }
            g.sequence = Some(seq);
        }
        GadgetKind::SeparableRange => {
            let seq = separable_range_sequence(table);
            let t = tree_from_separable(&seq, depth);
            g.tree = Some(DagCode::ambient(&t, depth, false)?);
            g.sequence = Some(seq.generators.into_iter().map(|x| x.head).collect());
        }
        GadgetKind::BctcColumn => {
            let t = BctcColumnTree { table: shared };
            let opens: Vec<Box<dyn Fn(&BitString) -> bool + Sync>> = (0..h as u64)
                .map(|n| {
                    let t = t.clone();
                    Box::new(move |s: &BitString| t.open(n, s)) as Box<dyn Fn(&BitString) -> bool + Sync>
                })
                .collect();
            let refs: Vec<OpenCode> = opens.iter().map(|b| b.as_ref()).collect();
            let start = BitString::ones(pair(0, h as u64) as usize);
            let r = baire_intersect(&t, &refs, &start, depth as usize, 4 * (h as u64 + 1))?;
            g.path = Some(r.path);
            g.stand_in = Some(format!("closed-form extendibility at horizon {h}"));
        }
        GadgetKind::SMMin => {
            let t = SmminTree { table: shared };
            let tf = t.clone();
            let f = MonotoneFn::new(move |s: &BitString| AlgebraicWeight::from_dyadic(tf.value(s)));
            let max_len = 2 * depth as usize + h + 2;
            let tc = t.clone();
            let density = move |p: &BitString, eps: &AlgebraicWeight| smmin_greedy(&tc, p, eps, max_len);
            let target = DensityTarget::new(AlgebraicWeight::zero());
            let r = dense_monotone_min(&t, &f, &target, &density, h as u32 + 1, depth as usize, 1 << 12)?;
            g.path = Some(r.path);
        }
        GadgetKind::NonRealizedInf => {}
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub n: u64,
    pub expected: bool,
    pub decoded: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetReport {
    pub kind: GadgetKind,
    pub horizon: usize,
    pub depth: u32,
    pub verdicts: Vec<Verdict>,
    pub mismatches: Vec<u64>,
    pub stand_in: Option<String>,
}

impl GadgetReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn first_decisive<F: Fn(&BitString) -> Option<bool>>(x: &BitString, test: F) -> Option<bool> {
    (0..=x.len()).find_map(|l| test(&x.prefix(l)))
}

/// Decode every n below the horizon and compare with range membership. For
/// range gadgets `expected` is membership; for the counterexample it is the
/// claim that 0^n 1 attains 2^{-n} > 0.
pub fn check_gadget(g: &GadgetInstance, table: &InjectionTable) -> GadgetReport {
    let h = table.horizon();
    let depth = g.depth as usize;
    let shared = Arc::new(table.clone());
    let decode: Box<dyn Fn(u64) -> bool> = match g.kind {
        GadgetKind::RangeTauTree => {
            let seq = g.sequence.clone().unwrap_or_default();
            let t = RangeTauTree { table: shared };
            Box::new(move |n| {
                let tn = tau(n as u32);
                let hit = seq.iter().any(|x| {
                    let full = Generator::eventually_zero(x.clone()).prefix(depth);
                    tn.is_prefix_of(&full) && t.member(&full)
                });
                !hit
            })
        }
        GadgetKind::SeparableRange => {
            let code = g.tree.clone();
            Box::new(move |n| {
                let y = Generator::eventually_zero(tau(n as u32)).prefix(depth);
                code.as_ref().is_some_and(|c| c.marks(&y))
            })
        }
        GadgetKind::BctcColumn => {
            let x = g.path.clone().unwrap_or_default();
            let t = BctcColumnTree { table: shared };
            Box::new(move |n| {
                first_decisive(&x, |s| {
                    if t.table.witness_below(n, s.len()) {
                        Some(true)
                    } else if column_has_zero(s, n) {
                        Some(false)
                    } else {
                        None
                    }
                })
                .unwrap_or(false)
            })
        }
        GadgetKind::SMMin => {
            let x = g.path.clone().unwrap_or_default();
            Box::new(move |n| x.get(n as usize) == Some(true))
        }
        GadgetKind::NonRealizedInf => Box::new(move |n| {
            let v = eval_counterexample(&tau(n as u32));
            v == AlgebraicWeight::from_dyadic(Dyadic::pow2_neg(n as u32)) && v.signum() > 0
        }),
    };
    let verdicts: Vec<Verdict> = (0..h as u64)
        .map(|n| {
            let expected = match g.kind {
                GadgetKind::NonRealizedInf => true,
                _ => table.in_range(n),
            };
            Verdict { n, expected, decoded: decode(n) }
        })
        .collect();
    let mismatches = verdicts.iter().filter(|v| v.expected != v.decoded).map(|v| v.n).collect();
    GadgetReport { kind: g.kind, horizon: h, depth: g.depth, verdicts, mismatches, stand_in: g.stand_in.clone() }
}

/// Range-at-horizon membership of every n < H, as the decoder reads it.
pub fn decode_range(g: &GadgetInstance) -> Vec<bool> {
    check_gadget(g, &g.table).verdicts.into_iter().map(|v| v.decoded).collect()
}
