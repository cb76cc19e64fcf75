//! Closed-set presentations and tree codes.
//!
//! A [`TreeSource`] answers membership and, optionally, extendibility. The
//! extendibility callback is the only way any operation learns whether a node
//! lies on an infinite path; operations that do not need it never call it.

use crate::bits::{block_len, string_at, BitString, CodePrefix};
use crate::error::{Error, Result};
use crate::weights::Dyadic;
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

/// Class hint shared by every node whose subtree is the full binary tree.
pub const FULL_CLASS: u64 = u64::MAX;

pub trait TreeSource: Send + Sync {
    fn member(&self, s: &BitString) -> bool;

    /// `None` when the source has no extendibility oracle.
    fn extendible(&self, _s: &BitString) -> Option<bool> {
        None
    }

    /// Nodes with equal class (at any lengths) have identical subtrees above
    /// them, for both membership and extendibility. Used only for memoization.
    fn node_class(&self, _s: &BitString) -> Option<u64> {
        None
    }
}

impl<T: TreeSource + ?Sized> TreeSource for &T {
    fn member(&self, s: &BitString) -> bool {
        (**self).member(s)
    }
    fn extendible(&self, s: &BitString) -> Option<bool> {
        (**self).extendible(s)
    }
    fn node_class(&self, s: &BitString) -> Option<u64> {
        (**self).node_class(s)
    }
}

impl<T: TreeSource + ?Sized> TreeSource for Box<T> {
    fn member(&self, s: &BitString) -> bool {
        (**self).member(s)
    }
    fn extendible(&self, s: &BitString) -> Option<bool> {
        (**self).extendible(s)
    }
    fn node_class(&self, s: &BitString) -> Option<u64> {
        (**self).node_class(s)
    }
}

impl<T: TreeSource + ?Sized> TreeSource for Arc<T> {
    fn member(&self, s: &BitString) -> bool {
        (**self).member(s)
    }
    fn extendible(&self, s: &BitString) -> Option<bool> {
        (**self).extendible(s)
    }
    fn node_class(&self, s: &BitString) -> Option<u64> {
        (**self).node_class(s)
    }
}

/// Extendibility, failing with `NotExtendible` when the oracle is absent.
pub fn require_extendible(src: &dyn TreeSource, s: &BitString) -> Result<bool> {
    src.extendible(s).ok_or_else(|| {
        Error::InvalidArgument(format!("an extendibility oracle is required (queried at {s})"))
    })
}

/// Closed-form trees built from finitely many cylinders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Builtin {
    Full,
    BranchLeft,
    BranchRight,
    /// Union of the cylinders N_{1^{i-1}0} over the binary digits c_i = 1 of c.
    Dyadic { digits: Vec<bool> },
}

impl Builtin {
    pub fn dyadic(c: &Dyadic) -> Result<Builtin> {
        if c.signum() <= 0 || *c > Dyadic::one() {
            return Err(Error::InvalidArgument(format!("dyadic tree measure must lie in (0, 1], got {c}")));
        }
        if *c == Dyadic::one() {
            return Ok(Builtin::Full);
        }
        let e = c.exponent();
        let num = c.numerator();
        let digits = (1..=e).map(|i| num.bit((e - i) as u64)).collect();
        Ok(Builtin::Dyadic { digits })
    }

    pub fn parse(name: &str) -> Result<Builtin> {
        let name = name.trim();
        match name {
            "full" => Ok(Builtin::Full),
            "branch-left" => Ok(Builtin::BranchLeft),
            "branch-right" => Ok(Builtin::BranchRight),
            _ => {
                let arg = name
                    .strip_prefix("dyadic:")
                    .or_else(|| name.strip_prefix("dyadic(").and_then(|r| r.strip_suffix(')')))
                    .ok_or_else(|| Error::Parse(format!("unknown builtin tree {name:?}")))?;
                Builtin::dyadic(&arg.parse()?)
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Builtin::Full => "full".into(),
            Builtin::BranchLeft => "branch-left".into(),
            Builtin::BranchRight => "branch-right".into(),
            Builtin::Dyadic { digits } => {
                let num = digits.iter().fold(num_bigint::BigInt::from(0), |acc, &b| acc * 2 + b as u32);
                format!("dyadic:{}", Dyadic::new(num, digits.len() as u32))
            }
        }
    }

    fn digit(digits: &[bool], i: usize) -> bool {
        digits.get(i).copied().unwrap_or(false)
    }
}

impl TreeSource for Builtin {
    fn member(&self, s: &BitString) -> bool {
        match self {
            Builtin::Full => true,
            Builtin::BranchLeft => s.get(0) != Some(true),
            Builtin::BranchRight => s.get(0) != Some(false),
            Builtin::Dyadic { digits } => match s.bits().iter().position(|&b| !b) {
                Some(p) => Builtin::digit(digits, p),
                None => digits[s.len().min(digits.len())..].iter().any(|&b| b),
            },
        }
    }

    fn extendible(&self, s: &BitString) -> Option<bool> {
        Some(self.member(s))
    }

    fn node_class(&self, s: &BitString) -> Option<u64> {
        match self {
            Builtin::Full => Some(FULL_CLASS),
            Builtin::BranchLeft | Builtin::BranchRight => Some(if s.is_empty() { 1 } else { FULL_CLASS }),
            Builtin::Dyadic { .. } => Some(if s.first_zero().is_none() { 2 + s.len() as u64 } else { FULL_CLASS }),
        }
    }
}

impl BitString {
    pub fn first_zero(&self) -> Option<usize> {
        self.bits().iter().position(|&b| !b)
    }
}

/// A tree given by its members of length ≤ `depth`; above the truncation each
/// depth-`depth` member is continued by its full cylinder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedTree {
    depth: u32,
    members: BTreeSet<BitString>,
    alive: HashSet<BitString>,
}

impl TruncatedTree {
    /// Checks prefix closure and lengths.
    pub fn new<I: IntoIterator<Item = BitString>>(depth: u32, members: I) -> Result<Self> {
        let members: BTreeSet<BitString> = members.into_iter().collect();
        let mut sorted: Vec<&BitString> = members.iter().collect();
        sorted.sort_by(|a, b| a.length_lex_cmp(b));
        for s in sorted {
            if s.len() as u32 > depth {
                return Err(Error::InvalidArgument(format!(
                    "member {s} is longer than the truncation depth {depth}"
                )));
            }
            if !s.is_empty() && !members.contains(&s.prefix(s.len() - 1)) {
                return Err(Error::NotPrefixClosed { witness: s.clone() });
            }
        }
        Ok(Self::from_closed(depth, members))
    }

    fn from_closed(depth: u32, members: BTreeSet<BitString>) -> Self {
        let mut alive = HashSet::new();
        for s in members.iter().filter(|s| s.len() as u32 == depth) {
            for k in (0..=s.len()).rev() {
                if !alive.insert(s.prefix(k)) {
                    break;
                }
            }
        }
        TruncatedTree { depth, members, alive }
    }

    pub fn empty(depth: u32) -> Self {
        TruncatedTree { depth, members: BTreeSet::new(), alive: HashSet::new() }
    }

    /// Truncation of an arbitrary source to `depth`, by breadth-first search.
    pub fn from_source(src: &dyn TreeSource, depth: u32) -> Self {
        let mut members = BTreeSet::new();
        let mut queue = VecDeque::new();
        if src.member(&BitString::empty()) {
            queue.push_back(BitString::empty());
        }
        while let Some(s) = queue.pop_front() {
            if (s.len() as u32) < depth {
                for b in [false, true] {
                    let c = s.child(b);
                    if src.member(&c) {
                        queue.push_back(c);
                    }
                }
            }
            members.insert(s);
        }
        Self::from_closed(depth, members)
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn members(&self) -> &BTreeSet<BitString> {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members of length exactly `k`, in lexicographic order.
    pub fn level(&self, k: u32) -> Vec<BitString> {
        let mut v: Vec<BitString> = self.members.iter().filter(|s| s.len() as u32 == k).cloned().collect();
        v.sort();
        v
    }

    pub fn contains(&self, s: &BitString) -> bool {
        self.members.contains(s)
    }
}

impl TreeSource for TruncatedTree {
    fn member(&self, s: &BitString) -> bool {
        if s.len() as u32 <= self.depth {
            self.members.contains(s)
        } else {
            self.members.contains(&s.prefix(self.depth as usize))
        }
    }

    fn extendible(&self, s: &BitString) -> Option<bool> {
        Some(if s.len() as u32 <= self.depth { self.alive.contains(s) } else { self.member(s) })
    }

    fn node_class(&self, s: &BitString) -> Option<u64> {
        (s.len() as u32 >= self.depth && self.member(s)).then_some(FULL_CLASS)
    }
}

/// Keep exactly the members with an extension at the truncation depth.
pub fn prune_truncation(t: &TruncatedTree) -> TruncatedTree {
    let members: BTreeSet<BitString> = t.members.iter().filter(|s| t.alive.contains(*s)).cloned().collect();
    TruncatedTree::from_closed(t.depth, members)
}

/// A finite automaton over {0,1}; a string is a member iff the run ends in an
/// accepting state. Acceptance must be prefix-closed on reachable states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomaticTree {
    start: usize,
    transitions: Vec<[usize; 2]>,
    accepting: Vec<bool>,
    live: Vec<bool>,
}

impl AutomaticTree {
    pub fn new(start: usize, transitions: Vec<[usize; 2]>, accepting: Vec<bool>) -> Result<Self> {
        let n = transitions.len();
        if n == 0 || accepting.len() != n || start >= n {
            return Err(Error::Parse("automaton needs matching transition and accepting tables".into()));
        }
        if transitions.iter().flatten().any(|&t| t >= n) {
            return Err(Error::Parse("automaton transition target out of range".into()));
        }
        // Shortest string whose run leaves acceptance and later re-enters it.
        let mut seen = vec![[false; 2]; n];
        let mut queue = VecDeque::new();
        let flag0 = !accepting[start];
        seen[start][flag0 as usize] = true;
        queue.push_back((start, flag0, BitString::empty()));
        while let Some((st, left, path)) = queue.pop_front() {
            for b in [false, true] {
                let nx = transitions[st][b as usize];
                let p = path.child(b);
                if left && accepting[nx] {
                    return Err(Error::NotPrefixClosed { witness: p });
                }
                let nl = left || !accepting[nx];
                if !seen[nx][nl as usize] {
                    seen[nx][nl as usize] = true;
                    queue.push_back((nx, nl, p));
                }
            }
        }
        // Greatest fixpoint: accepting states with a live successor.
        let mut live = accepting.clone();
        loop {
            let mut changed = false;
            for st in 0..n {
                if live[st] && !transitions[st].iter().any(|&t| live[t]) {
                    live[st] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(AutomaticTree { start, transitions, accepting, live })
    }

    pub fn run(&self, s: &BitString) -> usize {
        s.bits().iter().fold(self.start, |st, &b| self.transitions[st][b as usize])
    }

    pub fn states(&self) -> usize {
        self.transitions.len()
    }
}

impl TreeSource for AutomaticTree {
    fn member(&self, s: &BitString) -> bool {
        let mut st = self.start;
        if !self.accepting[st] {
            return false;
        }
        for &b in s.bits() {
            st = self.transitions[st][b as usize];
            if !self.accepting[st] {
                return false;
            }
        }
        true
    }

    fn extendible(&self, s: &BitString) -> Option<bool> {
        Some(self.member(s) && self.live[self.run(s)])
    }

    fn node_class(&self, s: &BitString) -> Option<u64> {
        Some(self.run(s) as u64)
    }
}

/// Wraps a source and counts oracle calls. Class hints are not forwarded, so
/// every query made by an operation goes through `member` or `extendible`.
pub struct Instrumented<S> {
    inner: S,
    member_calls: AtomicU64,
    extendible_calls: AtomicU64,
}

impl<S: TreeSource> Instrumented<S> {
    pub fn new(inner: S) -> Self {
        Instrumented { inner, member_calls: AtomicU64::new(0), extendible_calls: AtomicU64::new(0) }
    }

    pub fn member_calls(&self) -> u64 {
        self.member_calls.load(AtomicOrdering::Relaxed)
    }

    pub fn extendible_calls(&self) -> u64 {
        self.extendible_calls.load(AtomicOrdering::Relaxed)
    }

    pub fn reset(&self) {
        self.member_calls.store(0, AtomicOrdering::Relaxed);
        self.extendible_calls.store(0, AtomicOrdering::Relaxed);
    }
}

impl<S: TreeSource> TreeSource for Instrumented<S> {
    fn member(&self, s: &BitString) -> bool {
        self.member_calls.fetch_add(1, AtomicOrdering::Relaxed);
        self.inner.member(s)
    }

    fn extendible(&self, s: &BitString) -> Option<bool> {
        self.extendible_calls.fetch_add(1, AtomicOrdering::Relaxed);
        self.inner.extendible(s)
    }
}

/// A source with membership given by a closure and no oracle.
pub struct FnTree<F>(pub F);

impl<F: Fn(&BitString) -> bool + Send + Sync> TreeSource for FnTree<F> {
    fn member(&self, s: &BitString) -> bool {
        (self.0)(s)
    }
}

/// Membership and extendibility both given by closures.
pub struct OracleTree<F, G> {
    pub member: F,
    pub extendible: G,
}

impl<F, G> TreeSource for OracleTree<F, G>
where
    F: Fn(&BitString) -> bool + Send + Sync,
    G: Fn(&BitString) -> bool + Send + Sync,
{
    fn member(&self, s: &BitString) -> bool {
        (self.member)(s)
    }
    fn extendible(&self, s: &BitString) -> Option<bool> {
        Some((self.extendible)(s))
    }
}

/// Follow 0 when extendible, else 1, from `start` up to length `depth`.
pub fn leftmost_from(src: &dyn TreeSource, start: &BitString, depth: usize) -> Result<BitString> {
    if !require_extendible(src, start)? {
        return Err(Error::NotExtendible { at: start.clone() });
    }
    let mut cur = start.clone();
    while cur.len() < depth {
        let zero = cur.child(false);
        if require_extendible(src, &zero)? {
            cur = zero;
            continue;
        }
        let one = cur.child(true);
        if require_extendible(src, &one)? {
            cur = one;
        } else {
            return Err(Error::NotExtendible { at: cur });
        }
    }
    Ok(cur)
}

pub fn leftmost_path(src: &dyn TreeSource, depth: usize) -> Result<BitString> {
    leftmost_from(src, &BitString::empty(), depth)
}

/// An eventually constant infinite sequence: `head` followed by `tail` forever.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub head: BitString,
    pub tail: bool,
}

impl Generator {
    pub fn eventually_zero(head: BitString) -> Self {
        Generator { head, tail: false }
    }

    pub fn bit(&self, i: usize) -> bool {
        self.head.get(i).unwrap_or(self.tail)
    }

    pub fn prefix(&self, len: usize) -> BitString {
        BitString::from_bits((0..len).map(|i| self.bit(i)).collect())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeparableSequence {
    pub generators: Vec<Generator>,
}

/// Leftmost extensions (materialized to `depth`) of the first `count`
/// extendible nodes in length-lex order.
pub fn separable_from_pruned(src: &dyn TreeSource, count: usize, depth: usize) -> Result<SeparableSequence> {
    let mut generators = Vec::with_capacity(count);
    let mut queue = VecDeque::new();
    if count > 0 && require_extendible(src, &BitString::empty())? {
        queue.push_back(BitString::empty());
    }
    while let Some(s) = queue.pop_front() {
        if generators.len() == count {
            break;
        }
        let path = leftmost_from(src, &s, depth.max(s.len()))?;
        generators.push(Generator::eventually_zero(path));
        for b in [false, true] {
            let c = s.child(b);
            if require_extendible(src, &c)? {
                queue.push_back(c);
            }
        }
    }
    Ok(SeparableSequence { generators })
}

/// All length-≤`depth` prefixes of the generators.
pub fn tree_from_separable(seq: &SeparableSequence, depth: u32) -> TruncatedTree {
    let mut members = BTreeSet::new();
    for g in &seq.generators {
        let p = g.prefix(depth as usize);
        for k in 0..=p.len() {
            members.insert(p.prefix(k));
        }
    }
    TruncatedTree::from_closed(depth, members)
}

/// A validated code prefix ν, or a restriction marking derived from one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtreeCodePrefix {
    prefix: CodePrefix,
    block: Option<u32>,
    restriction: bool,
}

impl SubtreeCodePrefix {
    pub fn prefix(&self) -> &CodePrefix {
        &self.prefix
    }

    /// Largest complete block.
    pub fn block(&self) -> Option<u32> {
        self.block
    }

    pub fn is_restriction(&self) -> bool {
        self.restriction
    }

    pub fn marks(&self, s: &BitString) -> bool {
        self.prefix.mark(s).unwrap_or(false)
    }

    /// Wrap without validation; marks are assumed prefix-closed.
    pub fn unchecked(prefix: CodePrefix, restriction: bool) -> Self {
        let block = prefix.complete_block();
        SubtreeCodePrefix { prefix, block, restriction }
    }
}

/// Check the code conditions: (1) marked strings are prefix-closed, (2) they
/// lie in the ambient tree, (3) every complete block marks some string of
/// each length, and for pruned codes every marked string below the top block
/// has a marked child.
pub fn validate_code(nu: &CodePrefix, ambient: &dyn TreeSource, pruned: bool) -> Result<SubtreeCodePrefix> {
    let entries = nu.entries();
    for (i, &m) in entries.iter().enumerate() {
        if !m {
            continue;
        }
        let s = string_at(i as u64);
        if i > 0 && !entries[(i - 1) / 2] {
            return Err(Error::Condition1 { witness: s });
        }
        if !ambient.member(&s) {
            return Err(Error::Condition2 { witness: s });
        }
    }
    let block = nu.complete_block();
    if let Some(m) = block {
        for n in 0..=m {
            let lo = block_len(n) - (1u64 << n);
            if !entries[lo as usize..block_len(n) as usize].iter().any(|&b| b) {
                return Err(Error::Condition3 { block: n });
            }
        }
        if pruned {
            for i in 0..(block_len(m) - (1u64 << m)) {
                let c = 2 * i as usize + 1;
                if entries[i as usize] && !entries[c] && !entries[c + 1] {
                    return Err(Error::PrunedViolation { witness: string_at(i) });
                }
            }
        }
    }
    Ok(SubtreeCodePrefix { prefix: nu.clone(), block, restriction: false })
}

/// Z_τ: keep the marks compatible with τ.
pub fn restrict(z: &SubtreeCodePrefix, tau: &BitString) -> SubtreeCodePrefix {
    let entries = z
        .prefix
        .entries()
        .iter()
        .enumerate()
        .map(|(i, &m)| m && string_at(i as u64).compatible(tau))
        .collect();
    SubtreeCodePrefix { prefix: CodePrefix::new(entries), block: z.block, restriction: true }
}

/// A code through block `depth` for the full tree: a child of a marked node
/// is marked when `keep` says so, and the leftmost child of the first marked
/// node is forced when a level would otherwise be empty.
pub fn marking_from_choices(depth: u32, mut keep: impl FnMut(&BitString) -> bool) -> Result<SubtreeCodePrefix> {
    crate::bits::check_depth(depth)?;
    let mut entries = vec![false; block_len(depth) as usize];
    entries[0] = true;
    for level in 1..=depth {
        let lo = (block_len(level) - (1u64 << level)) as usize;
        let hi = block_len(level) as usize;
        for i in lo..hi {
            if entries[(i - 1) / 2] && keep(&string_at(i as u64)) {
                entries[i] = true;
            }
        }
        if !entries[lo..hi].iter().any(|&b| b) {
            let parent = (block_len(level - 1) - (1u64 << (level - 1))) as usize;
            let first = (parent..lo).find(|&i| entries[i]).expect("previous level is non-empty");
            entries[2 * first + 1] = true;
        }
    }
    validate_code(&CodePrefix::new(entries), &Builtin::Full, false)
}

/// The code of a source's tree through block `depth` (marks exactly the members).
pub fn ambient_prefix(src: &dyn TreeSource, depth: u32) -> Result<CodePrefix> {
    crate::bits::check_depth(depth)?;
    let entries = (0..block_len(depth)).map(|i| src.member(&string_at(i))).collect();
    Ok(CodePrefix::new(entries))
}
