//! Reduction engine turning arbitrary generator words into Murphy traces.
//!
//! Every trace of a word depends only on the multiset of cycle lengths the
//! word represents together with any spectator Murphy operators riding above
//! it. The engine works with canonical nodes capturing exactly that data,
//! derives one linear equation per node by expanding a Murphy operator
//! through its hook word sum, and solves the resulting system lazily. The
//! solved value of a node is a module-independent linear combination of
//! Murphy operator product traces, which specializes to any module through
//! the recursive trace tables.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::diagrams::{partitions_of, Partition};
use crate::laurent::{exact_div, poly_gcd, LaurentPoly, RationalFunction};
use crate::murphy::{murphy_product_trace, MurphyIndexList};

use super::{binomial, overlap_reduction, CharactersError, GWord, SegmentShape};

/// Budget, in visited commutation classes, for the rewriting search before
/// giving up on a word.
const REWRITE_NODE_CAP: usize = 150_000;

#[doc(hidden)]
pub mod stats {
    use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

    pub static REWRITE_CALLS: AtomicUsize = AtomicUsize::new(0);
    pub static REWRITE_NANOS: AtomicU64 = AtomicU64::new(0);
    pub static VISITED: AtomicUsize = AtomicUsize::new(0);
    pub static SOLVE_NANOS: AtomicU64 = AtomicU64::new(0);
    pub static EVAL_NANOS: AtomicU64 = AtomicU64::new(0);
    pub static BUILD_NANOS: AtomicU64 = AtomicU64::new(0);

    pub fn snapshot() -> String {
        format!(
            "rewrites {} visited {} rewrite {:.2}s solve {:.2}s build {:.2}s eval {:.2}s",
            REWRITE_CALLS.load(Ordering::Relaxed),
            VISITED.load(Ordering::Relaxed),
            REWRITE_NANOS.load(Ordering::Relaxed) as f64 / 1e9,
            SOLVE_NANOS.load(Ordering::Relaxed) as f64 / 1e9,
            BUILD_NANOS.load(Ordering::Relaxed) as f64 / 1e9,
            EVAL_NANOS.load(Ordering::Relaxed) as f64 / 1e9,
        )
    }
}

/// A canonical reduction node.
///
/// `shape` holds cycle lengths in weakly decreasing order, each at least 2,
/// laid out as packed ascending runs starting at letter 1 with one skipped
/// letter between runs. `tail` holds spectator Murphy indices in increasing
/// order, pairwise at distance at least 2 and clear of the packed runs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Node {
    shape: Vec<usize>,
    tail: Vec<usize>,
}

impl Node {
    fn new(mut shape: Vec<usize>, tail: Vec<usize>) -> Self {
        shape.sort_unstable_by(|a, b| b.cmp(a));
        debug_assert!(shape.iter().all(|&c| c >= 2));
        debug_assert!(tail.windows(2).all(|w| w[0] + 2 <= w[1]));
        Node { shape, tail }
    }

    fn letter_total(&self) -> usize {
        self.shape.iter().sum()
    }
}

/// The packed run positions of a node shape: run `t` covers generator
/// subscripts `start..=end` and acts on `end - start + 2` strands.
fn packed_runs(shape: &[usize]) -> Vec<(usize, usize)> {
    let mut runs = Vec::with_capacity(shape.len());
    let mut start = 1usize;
    for &width in shape {
        runs.push((start, start + width - 2));
        start += width;
    }
    runs
}

/// A value attached to a solved node: a linear combination of Murphy
/// operator product traces, independent of the module it will be read on.
#[derive(Debug, Clone, Default)]
struct Expansion {
    terms: HashMap<Vec<usize>, RationalFunction>,
}

impl Expansion {
    fn zero() -> Self {
        Expansion::default()
    }

    fn monomial(indices: Vec<usize>) -> Self {
        let mut terms = HashMap::new();
        terms.insert(indices, RationalFunction::one());
        Expansion { terms }
    }

    fn add_scaled(&mut self, other: &Expansion, c: &RationalFunction) {
        if c.is_zero() {
            return;
        }
        for (key, value) in &other.terms {
            let entry = self
                .terms
                .entry(key.clone())
                .or_insert_with(RationalFunction::zero);
            *entry = entry.add(&value.mul(c));
        }
        self.terms.retain(|_, v| !v.is_zero());
    }

    fn scale(&mut self, c: &RationalFunction) {
        if c.is_zero() {
            self.terms.clear();
            return;
        }
        for value in self.terms.values_mut() {
            *value = value.mul(c);
        }
    }

}

/// A solved node value flattened over one common denominator: the value on
/// the module `g` is the sum of `numerator * murphy_trace(g)` over the
/// terms, divided exactly by the denominator.
///
/// Building this form once per node moves all rational-function reduction
/// out of the per-module hot path; each evaluation is then a handful of
/// small polynomial multiplications and a single exact division.
struct CombinedForm {
    denominator: LaurentPoly,
    terms: Vec<(Vec<usize>, LaurentPoly)>,
}

impl CombinedForm {
    fn build(exp: &Expansion) -> Result<Self, CharactersError> {
        let t0 = std::time::Instant::now();
        let mut den = LaurentPoly::one();
        for c in exp.terms.values() {
            let shared = poly_gcd(&den, c.denominator());
            den = &den * &exact_div(c.denominator(), &shared)?;
        }
        let mut terms = Vec::with_capacity(exp.terms.len());
        for (indices, c) in &exp.terms {
            let scale = exact_div(&den, c.denominator())?;
            terms.push((indices.clone(), c.numerator() * &scale));
        }
        stats::BUILD_NANOS.fetch_add(
            t0.elapsed().as_nanos() as u64,
            std::sync::atomic::Ordering::Relaxed,
        );
        Ok(CombinedForm { denominator: den, terms })
    }

    /// Reads the value on the module labelled `g`.
    fn evaluate(&self, g: &Partition) -> Result<LaurentPoly, CharactersError> {
        let t0 = std::time::Instant::now();
        let mut total = LaurentPoly::zero();
        for (indices, num) in &self.terms {
            let list = MurphyIndexList::new(indices.clone())?;
            let tr = murphy_product_trace(g, &list)?;
            total = &total + &(num * &tr);
        }
        let out = exact_div(&total, &self.denominator)?;
        stats::EVAL_NANOS.fetch_add(
            t0.elapsed().as_nanos() as u64,
            std::sync::atomic::Ordering::Relaxed,
        );
        Ok(out)
    }
}

/// One linear relation: the node with the tail index `sum(shape)` appended
/// equals the recorded combination of nodes.
struct Equation {
    promoted: Node,
    comb: HashMap<Node, LaurentPoly>,
}

/// Shared solver state. Node values and rewriting results are independent
/// of any particular module, so both caches are global.
struct Engine {
    values: Mutex<HashMap<Node, Arc<Expansion>>>,
    combined: Mutex<HashMap<Node, Arc<CombinedForm>>>,
    rewrite_memo: Mutex<HashMap<Vec<usize>, Arc<Vec<(LaurentPoly, Vec<usize>)>>>>,
}

fn engine() -> &'static Engine {
    static ENGINE: OnceLock<Engine> = OnceLock::new();
    ENGINE.get_or_init(|| Engine {
        values: Mutex::new(HashMap::new()),
        combined: Mutex::new(HashMap::new()),
        rewrite_memo: Mutex::new(HashMap::new()),
    })
}

impl Engine {
    fn lookup(&self, node: &Node) -> Option<Arc<Expansion>> {
        self.values.lock().unwrap().get(node).cloned()
    }

    fn store(&self, node: Node, value: Expansion) -> Arc<Expansion> {
        let mut map = self.values.lock().unwrap();
        map.entry(node).or_insert_with(|| Arc::new(value)).clone()
    }
}

/// The combined form of a node's solved value, built on first use.
fn combined_for(node: &Node) -> Result<Arc<CombinedForm>, CharactersError> {
    let eng = engine();
    if let Some(hit) = eng.combined.lock().unwrap().get(node) {
        return Ok(hit.clone());
    }
    let expansion = resolve(node)?;
    let built = Arc::new(CombinedForm::build(&expansion)?);
    Ok(eng
        .combined
        .lock()
        .unwrap()
        .entry(node.clone())
        .or_insert(built)
        .clone())
}

/// Splits a word into maximal ascending consecutive segments and returns the
/// cycle lengths if the segments are pairwise separated by at least one
/// skipped subscript, meaning the word is a plain product of disjoint runs.
fn parse_disjoint_runs(word: &[usize]) -> Option<Vec<usize>> {
    if word.is_empty() {
        return Some(Vec::new());
    }
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut start = word[0];
    let mut prev = word[0];
    for &l in &word[1..] {
        if l == prev + 1 {
            prev = l;
        } else {
            spans.push((start, prev));
            start = l;
            prev = l;
        }
    }
    spans.push((start, prev));
    spans.sort_unstable();
    for pair in spans.windows(2) {
        if pair[0].1 + 2 > pair[1].0 {
            return None;
        }
    }
    let mut widths: Vec<usize> = spans.iter().map(|&(a, b)| b - a + 2).collect();
    widths.sort_unstable_by(|a, b| b.cmp(a));
    Some(widths)
}

/// Canonical representative of the commutation class of a word: the
/// lexicographically least linearization of the dependency order in which a
/// letter must stay after every earlier letter within distance one of it.
/// Two words have equal canonical forms exactly when repeated swaps of
/// distant letters transform one into the other.
fn canonical_form(word: &[usize]) -> Vec<usize> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let len = word.len();
    let mut indegree = vec![0usize; len];
    for i in 0..len {
        for j in 0..i {
            if word[j].abs_diff(word[i]) <= 1 {
                indegree[i] += 1;
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::new();
    for (i, &d) in indegree.iter().enumerate() {
        if d == 0 {
            ready.push(Reverse((word[i], i)));
        }
    }
    let mut out = Vec::with_capacity(len);
    let mut emitted = vec![false; len];
    while let Some(Reverse((letter, i))) = ready.pop() {
        out.push(letter);
        emitted[i] = true;
        for j in (i + 1)..len {
            if !emitted[j] && word[i].abs_diff(word[j]) <= 1 {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.push(Reverse((word[j], j)));
                }
            }
        }
    }
    out
}

/// Bitmask of strict ancestors per position in the dependency order of the
/// word, where position j precedes i when j < i and the letters are within
/// distance one. Words are limited to 64 letters, far beyond any word the
/// engine constructs.
fn ancestor_masks(word: &[usize]) -> Vec<u64> {
    let len = word.len();
    assert!(len <= 64, "rewriting supports words of at most 64 letters");
    let mut anc = vec![0u64; len];
    for i in 0..len {
        let mut m = 0u64;
        for j in 0..i {
            if word[j].abs_diff(word[i]) <= 1 {
                m |= anc[j] | (1 << j);
            }
        }
        anc[i] = m;
    }
    anc
}

/// Finds two equal letters that can be brought adjacent by swaps of distant
/// letters: positions u < w with equal letters and nothing else ordered
/// strictly between them.
fn find_mergeable_pair(word: &[usize], anc: &[u64]) -> Option<(usize, usize)> {
    let len = word.len();
    for w in 0..len {
        for u in 0..w {
            if word[u] != word[w] {
                continue;
            }
            if nothing_between(anc, u, w, None) {
                return Some((u, w));
            }
        }
    }
    None
}

/// Whether no position other than `allowed` is ordered strictly between
/// `u` and `w`.
fn nothing_between(anc: &[u64], u: usize, w: usize, allowed: Option<usize>) -> bool {
    let mut between = anc[w] & !(1u64 << u);
    if let Some(a) = allowed {
        between &= !(1u64 << a);
    }
    while between != 0 {
        let z = between.trailing_zeros() as usize;
        between &= between - 1;
        if (anc[z] >> u) & 1 == 1 {
            return false;
        }
    }
    true
}

/// Reorders the word so the given positions sit consecutively, preceded by
/// every ancestor of the last of them and followed by everything else. Valid
/// whenever nothing else is ordered between the first and last of them.
fn linearize_with_block(word: &[usize], anc: &[u64], block: &[usize]) -> (Vec<usize>, usize) {
    let last = *block.last().expect("nonempty block");
    let mut in_block = 0u64;
    for &b in block {
        in_block |= 1 << b;
    }
    let before = anc[last] & !in_block;
    let mut out = Vec::with_capacity(word.len());
    for i in 0..word.len() {
        if (before >> i) & 1 == 1 {
            out.push(word[i]);
        }
    }
    let offset = out.len();
    for &b in block {
        out.push(word[b]);
    }
    for i in 0..word.len() {
        if (before >> i) & 1 == 0 && (in_block >> i) & 1 == 0 {
            out.push(word[i]);
        }
    }
    (out, offset)
}

/// All words reachable by one braid move somewhere in the commutation class:
/// positions u < v < w with letters x, y, x at distance one that can be made
/// consecutive, rewritten to y, x, y.
fn braid_neighbours(word: &[usize], anc: &[u64]) -> Vec<Vec<usize>> {
    let len = word.len();
    let mut out = Vec::new();
    for v in 0..len {
        for u in 0..v {
            if word[u].abs_diff(word[v]) != 1 {
                continue;
            }
            for w in (v + 1)..len {
                if word[w] != word[u] {
                    continue;
                }
                if !nothing_between(anc, u, w, Some(v)) {
                    continue;
                }
                let (mut lin, offset) = linearize_with_block(word, anc, &[u, v, w]);
                let (x, y) = (word[u], word[v]);
                lin[offset] = y;
                lin[offset + 1] = x;
                lin[offset + 2] = y;
                out.push(lin);
            }
        }
    }
    out
}

/// All words reachable by one cyclic rotation of some linearization of the
/// class: any letter with no ancestor can be moved to the end.
fn rotation_neighbours(word: &[usize], anc: &[u64]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for (i, &mask) in anc.iter().enumerate() {
        if mask == 0 && word.len() > 1 {
            let mut nb = Vec::with_capacity(word.len());
            nb.extend_from_slice(&word[..i]);
            nb.extend_from_slice(&word[i + 1..]);
            nb.push(word[i]);
            out.push(nb);
        }
    }
    out
}

/// Trace-preserving rewriting of a word into combinations of disjoint-run
/// words, returned as cycle length multisets with coefficients.
///
/// The search walks commutation classes of cyclic words. Swaps of distant
/// letters are absorbed into the canonical class representative, rotations
/// and braid moves connect classes, and all three preserve the trace. As
/// soon as a class parses as disjoint runs the multiset is read off; as
/// soon as a class can bring two equal letters together the quadratic
/// relation splits the trace into two strictly shorter words handled
/// recursively. A class budget guards against runaway exploration.
fn rewrite_word(word: &[usize]) -> Result<Arc<Vec<(LaurentPoly, Vec<usize>)>>, CharactersError> {
    let eng = engine();
    let canonical = canonical_form(word);
    if let Some(hit) = eng.rewrite_memo.lock().unwrap().get(&canonical) {
        return Ok(hit.clone());
    }
    let result = rewrite_uncached(&canonical)?;
    let arc = Arc::new(result);
    eng.rewrite_memo
        .lock()
        .unwrap()
        .insert(canonical, arc.clone());
    Ok(arc)
}

fn rewrite_uncached(start: &[usize]) -> Result<Vec<(LaurentPoly, Vec<usize>)>, CharactersError> {
    use std::sync::atomic::Ordering;
    let t0 = std::time::Instant::now();
    stats::REWRITE_CALLS.fetch_add(1, Ordering::Relaxed);
    let res = rewrite_search(start);
    stats::REWRITE_NANOS.fetch_add(t0.elapsed().as_nanos() as u64, Ordering::Relaxed);
    res
}

fn rewrite_search(start: &[usize]) -> Result<Vec<(LaurentPoly, Vec<usize>)>, CharactersError> {
    let mut visited: HashMap<Vec<usize>, ()> = HashMap::new();
    let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
    visited.insert(start.to_vec(), ());
    queue.push_back(start.to_vec());
    while let Some(w) = queue.pop_front() {
        if let Some(widths) = parse_disjoint_runs(&w) {
            stats::VISITED.fetch_add(visited.len(), std::sync::atomic::Ordering::Relaxed);
            return Ok(vec![(LaurentPoly::one(), widths)]);
        }
        let anc = ancestor_masks(&w);
        if let Some((u, pair)) = find_mergeable_pair(&w, &anc) {
            let (lin, offset) = linearize_with_block(&w, &anc, &[u, pair]);
            stats::VISITED.fetch_add(visited.len(), std::sync::atomic::Ordering::Relaxed);
            return quadratic_split(&lin, offset);
        }
        if visited.len() > REWRITE_NODE_CAP {
            return Err(CharactersError::UnreducibleWord);
        }
        for nb in braid_neighbours(&w, &anc)
            .into_iter()
            .chain(rotation_neighbours(&w, &anc))
        {
            let key = canonical_form(&nb);
            if visited.insert(key.clone(), ()).is_none() {
                queue.push_back(key);
            }
        }
    }
    Err(CharactersError::UnreducibleWord)
}

/// Applies the quadratic relation to the repeated letter at `pos`, `pos + 1`
/// and recursively rewrites both shorter words.
fn quadratic_split(
    word: &[usize],
    pos: usize,
) -> Result<Vec<(LaurentPoly, Vec<usize>)>, CharactersError> {
    let q = LaurentPoly::q();
    let qm1 = &q - &LaurentPoly::one();
    let mut single = word.to_vec();
    single.remove(pos);
    let mut dropped = single.clone();
    dropped.remove(pos);
    let mut out: HashMap<Vec<usize>, LaurentPoly> = HashMap::new();
    for (coeff, widths) in rewrite_word(&single)?.iter() {
        let entry = out.entry(widths.clone()).or_insert_with(LaurentPoly::zero);
        *entry = &*entry + &(coeff * &qm1);
    }
    for (coeff, widths) in rewrite_word(&dropped)?.iter() {
        let entry = out.entry(widths.clone()).or_insert_with(LaurentPoly::zero);
        *entry = &*entry + &(coeff * &q);
    }
    Ok(out
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(w, c)| (c, w))
        .collect())
}

/// Expands the trace of `runs * hook * tail` into a combination of nodes,
/// where `runs` are positioned ascending runs below the hook top and `hook`
/// is the palindrome word on letters `base..m-1` rising and falling.
fn flatten(
    runs: &[(usize, usize)],
    base: usize,
    m: usize,
    tail: &[usize],
) -> Result<HashMap<Node, LaurentPoly>, CharactersError> {
    debug_assert!(base >= 1 && base < m);
    let mut acc: HashMap<Node, LaurentPoly> = HashMap::new();

    let top = runs.last().copied();
    match top {
        // Standalone hook: nothing overlaps or touches its base.
        None => standalone(runs, base, m, tail, &mut acc)?,
        Some((a, b)) => {
            if base >= b + 2 {
                standalone(runs, base, m, tail, &mut acc)?;
            } else if base == b + 1 {
                adjacent(runs, base, m, tail, &mut acc)?;
            } else if base >= a {
                overlap(runs, base, m, tail, &mut acc)?;
            } else {
                deep(runs, base, m, tail, &mut acc)?;
            }
        }
    }
    acc.retain(|_, c| !c.is_zero());
    Ok(acc)
}

fn add_term(acc: &mut HashMap<Node, LaurentPoly>, node: Node, c: LaurentPoly) {
    let entry = acc.entry(node).or_insert_with(LaurentPoly::zero);
    *entry = &*entry + &c;
}

fn merge_scaled(
    acc: &mut HashMap<Node, LaurentPoly>,
    terms: HashMap<Node, LaurentPoly>,
    c: &LaurentPoly,
) {
    for (node, coeff) in terms {
        add_term(acc, node, &coeff * c);
    }
}

fn widths_of(runs: &[(usize, usize)]) -> Vec<usize> {
    runs.iter().map(|&(a, b)| b - a + 2).collect()
}

/// Hook clear of all runs: peel its lowest letter with the quadratic
/// relation. The peeled letter becomes a width-2 run adjacent to the rest of
/// the hook, and the other branch simply shortens the hook.
fn standalone(
    runs: &[(usize, usize)],
    base: usize,
    m: usize,
    tail: &[usize],
    acc: &mut HashMap<Node, LaurentPoly>,
) -> Result<(), CharactersError> {
    if base == m - 1 {
        let mut widths = widths_of(runs);
        widths.push(2);
        add_term(acc, Node::new(widths, tail.to_vec()), LaurentPoly::one());
        return Ok(());
    }
    let q = LaurentPoly::q();
    let qm1 = &q - &LaurentPoly::one();
    let mut with_run = runs.to_vec();
    with_run.push((base, base));
    merge_scaled(acc, flatten(&with_run, base + 1, m, tail)?, &qm1);
    merge_scaled(acc, flatten(runs, base + 1, m, tail)?, &q);
    Ok(())
}

/// Hook based directly above the top run: merge them. The merged ascending
/// run absorbs part of the hook, leaving no hook behind.
fn adjacent(
    runs: &[(usize, usize)],
    base: usize,
    m: usize,
    tail: &[usize],
    acc: &mut HashMap<Node, LaurentPoly>,
) -> Result<(), CharactersError> {
    let (c, p) = *runs.last().expect("adjacent case requires a run");
    debug_assert_eq!(base, p + 1);
    let r = m - 1 - p;
    let q = LaurentPoly::q();
    let qm1 = &q - &LaurentPoly::one();
    for l in 0..r {
        let coeff = LaurentPoly::constant(binomial(r - 1, l)).shift(l as i64)
            * qm1.pow((r - 1 - l) as u32);
        let mut widths = widths_of(&runs[..runs.len() - 1]);
        widths.push((p + r - l) - c + 2);
        add_term(acc, Node::new(widths, tail.to_vec()), coeff);
    }
    Ok(())
}

/// Hook based inside the top run: split the run at every possible point.
/// Each split leaves two shorter runs below a hook that now sits adjacent
/// to the upper piece, handled recursively.
fn overlap(
    runs: &[(usize, usize)],
    base: usize,
    m: usize,
    tail: &[usize],
    acc: &mut HashMap<Node, LaurentPoly>,
) -> Result<(), CharactersError> {
    let (c, p) = *runs.last().expect("overlap case requires a run");
    debug_assert!(base >= c && base <= p);
    let r = m - 1 - p;
    debug_assert!(r >= 1);
    let d = p - base + 1;
    for (coeff, kappa) in overlap_reduction(d, 1, r) {
        let mut pieces = runs[..runs.len() - 1].to_vec();
        if kappa == 0 {
            pieces.push((c, p));
        } else {
            if kappa >= 2 {
                pieces.push((c, c + kappa - 2));
            }
            if c + kappa <= p {
                pieces.push((c + kappa, p));
            }
        }
        merge_scaled(acc, flatten(&pieces, p + 1, m, tail)?, &coeff);
    }
    Ok(())
}

/// Hook based below the top run: no closed split applies, so the entangled
/// runs and the hook are rewritten as a word. Runs fully below the hook base
/// commute out and rejoin afterwards.
fn deep(
    runs: &[(usize, usize)],
    base: usize,
    m: usize,
    tail: &[usize],
    acc: &mut HashMap<Node, LaurentPoly>,
) -> Result<(), CharactersError> {
    let mut low_widths: Vec<usize> = Vec::new();
    let mut word: Vec<usize> = Vec::new();
    for &(a, b) in runs {
        if b + 1 >= base {
            word.extend(a..=b);
        } else {
            low_widths.push(b - a + 2);
        }
    }
    word.extend(base..m);
    word.extend((base..m - 1).rev());
    for (coeff, widths) in rewrite_word(&word)?.iter() {
        let mut all = widths.clone();
        all.extend_from_slice(&low_widths);
        add_term(acc, Node::new(all, tail.to_vec()), coeff.clone());
    }
    Ok(())
}

/// Builds the defining equation of a node with a nonempty shape: expanding
/// the Murphy operator just above the packed runs through its hook word sum
/// relates the node with that operator appended to combinations of nodes.
fn node_equation(node: &Node) -> Result<Equation, CharactersError> {
    let runs = packed_runs(&node.shape);
    let (_, b) = *runs.last().expect("equation requires a nonempty shape");
    let m = b + 1;
    debug_assert_eq!(m, node.letter_total());
    let others = &runs[..runs.len() - 1];
    let mut comb: HashMap<Node, LaurentPoly> = HashMap::new();
    for i in 1..=b {
        let weight = LaurentPoly::one().shift(i as i64 - b as i64);
        merge_scaled(&mut comb, flatten(others, i, m, &node.tail)?, &weight);
    }
    comb.retain(|_, c| !c.is_zero());
    let mut tail = node.tail.clone();
    tail.push(m);
    tail.sort_unstable();
    let promoted = Node::new(node.shape[..node.shape.len() - 1].to_vec(), tail);
    Ok(Equation { promoted, comb })
}

/// Strongly connected components of the dependency graph among unsolved
/// nodes, listed with every component after all components it depends on.
fn dependency_components(
    order: &[Node],
    edges: &HashMap<Node, Vec<Node>>,
) -> Vec<Vec<Node>> {
    let index_of: HashMap<&Node, usize> = order.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let adj: Vec<Vec<usize>> = order
        .iter()
        .map(|n| {
            edges[n]
                .iter()
                .filter_map(|t| index_of.get(t).copied())
                .collect()
        })
        .collect();
    let n = order.len();
    let mut number = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next = 0usize;
    let mut components: Vec<Vec<Node>> = Vec::new();
    for root in 0..n {
        if number[root] != usize::MAX {
            continue;
        }
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        number[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut child)) = frames.last_mut() {
            if *child < adj[v].len() {
                let w = adj[v][*child];
                *child += 1;
                if number[w] == usize::MAX {
                    number[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(number[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == number[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("component stack underflow");
                        on_stack[w] = false;
                        component.push(order[w].clone());
                        if w == v {
                            break;
                        }
                    }
                    components.push(component);
                }
            }
        }
    }
    components
}

/// Solves for the value of a node, discovering and resolving every node it
/// depends on. Values are cached globally, so repeated calls are cheap.
fn resolve(target: &Node) -> Result<Arc<Expansion>, CharactersError> {
    let eng = engine();
    if let Some(hit) = eng.lookup(target) {
        return Ok(hit);
    }

    // Discovery: walk the dependency graph, building one equation per
    // unsolved node with a nonempty shape. Nodes with an empty shape are
    // already plain Murphy product traces.
    let mut equations: HashMap<Node, Equation> = HashMap::new();
    let mut stack = vec![target.clone()];
    while let Some(node) = stack.pop() {
        if equations.contains_key(&node) || eng.lookup(&node).is_some() {
            continue;
        }
        if node.shape.is_empty() {
            eng.store(node.clone(), Expansion::monomial(node.tail.clone()));
            continue;
        }
        let eq = node_equation(&node)?;
        stack.push(eq.promoted.clone());
        stack.extend(eq.comb.keys().cloned());
        equations.insert(node, eq);
    }

    // Group mutually dependent nodes and solve each group in dependency
    // order by Gaussian elimination over rational functions.
    let order: Vec<Node> = equations.keys().cloned().collect();
    let edges: HashMap<Node, Vec<Node>> = order
        .iter()
        .map(|node| {
            let eq = &equations[node];
            let mut out: Vec<Node> = Vec::new();
            if equations.contains_key(&eq.promoted) {
                out.push(eq.promoted.clone());
            }
            for t in eq.comb.keys() {
                if t != node && equations.contains_key(t) {
                    out.push(t.clone());
                }
            }
            (node.clone(), out)
        })
        .collect();

    for component in dependency_components(&order, &edges) {
        solve_component(&component, &equations)?;
    }

    eng.lookup(target)
        .ok_or(CharactersError::UnreducibleWord)
}

/// Solves one strongly connected group of node equations. Each equation is
/// rearranged so that unknowns sit on the left and already solved values on
/// the right, then eliminated exactly.
fn solve_component(
    component: &[Node],
    equations: &HashMap<Node, Equation>,
) -> Result<(), CharactersError> {
    let t0 = std::time::Instant::now();
    let res = solve_component_inner(component, equations);
    stats::SOLVE_NANOS.fetch_add(
        t0.elapsed().as_nanos() as u64,
        std::sync::atomic::Ordering::Relaxed,
    );
    res
}

fn solve_component_inner(
    component: &[Node],
    equations: &HashMap<Node, Equation>,
) -> Result<(), CharactersError> {
    let eng = engine();
    if component.iter().all(|n| eng.lookup(n).is_some()) {
        return Ok(());
    }
    let k = component.len();
    let index_of: HashMap<&Node, usize> =
        component.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut matrix = vec![vec![RationalFunction::zero(); k]; k];
    let mut rhs: Vec<Expansion> = Vec::with_capacity(k);
    for (row, node) in component.iter().enumerate() {
        let eq = &equations[node];
        let promoted = eng
            .lookup(&eq.promoted)
            .expect("dependency resolved before its dependents");
        let mut b = Expansion::zero();
        b.add_scaled(&promoted, &RationalFunction::one());
        for (t, coeff) in &eq.comb {
            let c = RationalFunction::from_poly(coeff.clone());
            match index_of.get(t) {
                Some(&col) => {
                    matrix[row][col] = matrix[row][col].add(&c);
                }
                None => {
                    let value = eng
                        .lookup(t)
                        .expect("dependency resolved before its dependents");
                    b.add_scaled(&value, &c.neg());
                }
            }
        }
        rhs.push(b);
    }

    // Gauss-Jordan elimination; the system is square and nonsingular by
    // construction of the equations.
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| !matrix[r][col].is_zero())
            .expect("node equation system is nonsingular");
        matrix.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = matrix[col][col]
            .inverse()
            .expect("pivot entry is nonzero");
        for j in col..k {
            matrix[col][j] = matrix[col][j].mul(&inv);
        }
        rhs[col].scale(&inv);
        for row in 0..k {
            if row == col || matrix[row][col].is_zero() {
                continue;
            }
            let factor = matrix[row][col].clone();
            for j in col..k {
                let delta = matrix[col][j].mul(&factor);
                matrix[row][j] = matrix[row][j].sub(&delta);
            }
            let source = rhs[col].clone();
            rhs[row].add_scaled(&source, &factor.neg());
        }
    }
    for (node, value) in component.iter().zip(rhs.into_iter()) {
        eng.store(node.clone(), value);
    }
    Ok(())
}

fn class_memo() -> &'static Mutex<HashMap<(Partition, Vec<usize>), LaurentPoly>> {
    static MEMO: OnceLock<Mutex<HashMap<(Partition, Vec<usize>), LaurentPoly>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Character of the module labelled `g` on the conjugacy class labelled
/// `mu`, both partitions of the same number.
pub fn class_character(g: &Partition, mu: &Partition) -> Result<LaurentPoly, CharactersError> {
    if g.n() != mu.n() {
        return Err(CharactersError::SizeMismatch {
            expected: g.n(),
            found: mu.n(),
        });
    }
    let segments = SegmentShape::from_class(mu);
    let key = (g.clone(), segments.lengths().to_vec());
    if let Some(hit) = class_memo().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let node = Node::new(segments.lengths().to_vec(), Vec::new());
    let value = combined_for(&node)?.evaluate(g)?;
    class_memo().lock().unwrap().insert(key, value.clone());
    Ok(value)
}

/// Trace of an arbitrary generator word on the module labelled `g`.
///
/// The word is reduced through trace-preserving rewriting, so the result
/// equals the trace of the represented element no matter how the word is
/// spelled. Letters must be generator subscripts valid for `g.n()` strands.
pub fn reduce_word_trace(g: &Partition, word: &GWord) -> Result<LaurentPoly, CharactersError> {
    let n = g.n();
    if word.max_letter() + 1 > n {
        return Err(CharactersError::SizeMismatch {
            expected: n,
            found: word.max_letter() + 1,
        });
    }
    let mut acc = LaurentPoly::zero();
    for (coeff, widths) in rewrite_word(word.letters())?.iter() {
        let node = Node::new(widths.clone(), Vec::new());
        let value = combined_for(&node)?.evaluate(g)?;
        acc = &acc + &(coeff * &value);
    }
    Ok(acc)
}

/// The full character table on `n` strands: rows are modules, columns are
/// conjugacy classes, both in the same canonical partition order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable {
    n: usize,
    labels: Vec<Partition>,
    entries: Vec<Vec<LaurentPoly>>,
}

impl CharacterTable {
    /// Number of strands.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row and column labels, in the canonical partition order.
    pub fn labels(&self) -> &[Partition] {
        &self.labels
    }

    /// Table entries, row major: `entries()[i][j]` is the character of the
    /// module `labels()[i]` on the class `labels()[j]`.
    pub fn entries(&self) -> &[Vec<LaurentPoly>] {
        &self.entries
    }

    /// Looks up a single entry by labels.
    pub fn entry(&self, module: &Partition, class: &Partition) -> Option<&LaurentPoly> {
        let row = self.labels.iter().position(|p| p == module)?;
        let col = self.labels.iter().position(|p| p == class)?;
        Some(&self.entries[row][col])
    }

    /// Renders the table as CSV with quoted partition labels. Polynomial
    /// entries use the canonical display form and never contain commas.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("module");
        for class in &self.labels {
            out.push_str(",\"");
            out.push_str(&class.to_string());
            out.push('"');
        }
        out.push('\n');
        for (row, module) in self.labels.iter().enumerate() {
            out.push('"');
            out.push_str(&module.to_string());
            out.push('"');
            for value in &self.entries[row] {
                out.push(',');
                out.push_str(&value.to_string());
            }
            out.push('\n');
        }
        out
    }
}

impl Serialize for CharacterTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let labels: Vec<String> = self.labels.iter().map(|p| p.to_string()).collect();
        let mut state = serializer.serialize_struct("CharacterTable", 4)?;
        state.serialize_field("n", &self.n)?;
        state.serialize_field("modules", &labels)?;
        state.serialize_field("classes", &labels)?;
        state.serialize_field("entries", &self.entries)?;
        state.end()
    }
}

fn assemble_table(
    n: usize,
    cells: Vec<LaurentPoly>,
    labels: Vec<Partition>,
) -> CharacterTable {
    let count = labels.len();
    let mut rows = Vec::with_capacity(count);
    let mut iter = cells.into_iter();
    for _ in 0..count {
        rows.push(iter.by_ref().take(count).collect());
    }
    CharacterTable {
        n,
        labels,
        entries: rows,
    }
}

/// Computes the character table on `n` strands, using data parallelism over
/// the cells when the crate is built with the parallel feature.
pub fn character_table(n: usize) -> Result<CharacterTable, CharactersError> {
    let labels = partitions_of(n);
    let pairs: Vec<(Partition, Partition)> = labels
        .iter()
        .flat_map(|g| labels.iter().map(move |mu| (g.clone(), mu.clone())))
        .collect();
    let cells: Result<Vec<LaurentPoly>, CharactersError> =
        crate::exec::par_map(pairs, |(g, mu)| class_character(&g, &mu))
            .into_iter()
            .collect();
    Ok(assemble_table(n, cells?, labels))
}

/// Sequential counterpart of [`character_table`], always single threaded
/// regardless of enabled features. Useful as a comparison baseline.
pub fn character_table_seq(n: usize) -> Result<CharacterTable, CharactersError> {
    let labels = partitions_of(n);
    let mut cells = Vec::with_capacity(labels.len() * labels.len());
    for g in &labels {
        for mu in &labels {
            cells.push(class_character(g, mu)?);
        }
    }
    Ok(assemble_table(n, cells, labels))
}

#[cfg(test)]
mod tests {
    use super::super::class_word;
    use super::*;
    use crate::diagrams::dimension;
    use crate::laurent::Rational;
    use crate::oracle::{build_irrep, word_trace};

    fn lp(s: &str) -> LaurentPoly {
        s.parse().expect("valid polynomial literal")
    }

    fn part(s: &str) -> Partition {
        s.parse().expect("valid partition literal")
    }

    #[test]
    fn disjoint_run_parser_recognizes_plain_words() {
        assert_eq!(parse_disjoint_runs(&[]), Some(vec![]));
        assert_eq!(parse_disjoint_runs(&[1]), Some(vec![2]));
        assert_eq!(parse_disjoint_runs(&[1, 3]), Some(vec![2, 2]));
        assert_eq!(parse_disjoint_runs(&[3, 4, 1]), Some(vec![3, 2]));
        assert_eq!(parse_disjoint_runs(&[2, 1]), None);
        assert_eq!(parse_disjoint_runs(&[1, 2, 3]), Some(vec![4]));
        assert_eq!(parse_disjoint_runs(&[1, 1]), None);
        assert_eq!(parse_disjoint_runs(&[1, 2, 4, 5]), Some(vec![3, 3]));
        assert_eq!(parse_disjoint_runs(&[1, 2, 3, 4]), Some(vec![5]));
    }

    #[test]
    fn rewriting_handles_braid_and_rotation_equivalents() {
        // g_2 g_1 g_2 is braid equivalent to g_1 g_2 g_1, whose rotation
        // g_2 g_1 g_1 exposes the quadratic relation.
        let result = rewrite_word(&[2, 1, 2]).unwrap();
        let mut total = HashMap::new();
        for (c, w) in result.iter() {
            total.insert(w.clone(), c.clone());
        }
        // (q - 1) tr(three cycle) + q tr(two cycle) in some arrangement.
        assert_eq!(total.get(&vec![3]).cloned(), Some(lp("q-1")));
        assert_eq!(total.get(&vec![2]).cloned(), Some(lp("q")));
    }

    #[test]
    fn two_strand_characters_match_frozen_values() {
        assert_eq!(
            class_character(&part("[2]"), &part("[2]")).unwrap(),
            lp("q")
        );
        assert_eq!(
            class_character(&part("[2]"), &part("[1,1]")).unwrap(),
            lp("1")
        );
        assert_eq!(
            class_character(&part("[1,1]"), &part("[2]")).unwrap(),
            lp("-1")
        );
        assert_eq!(
            class_character(&part("[1,1]"), &part("[1,1]")).unwrap(),
            lp("1")
        );
    }

    #[test]
    fn three_strand_row_matches_frozen_values() {
        let g = part("[2,1]");
        assert_eq!(class_character(&g, &part("[3]")).unwrap(), lp("-q"));
        assert_eq!(class_character(&g, &part("[2,1]")).unwrap(), lp("q-1"));
        assert_eq!(class_character(&g, &part("[1,1,1]")).unwrap(), lp("2"));
    }

    #[test]
    fn identity_class_gives_dimension() {
        for n in 1..=6 {
            let id = Partition::new(vec![1; n]);
            for g in partitions_of(n) {
                let value = class_character(&g, &id).unwrap();
                let expected = LaurentPoly::constant(Rational::from_integer(
                    (dimension(&g) as i64).into(),
                ));
                assert_eq!(value, expected, "identity character of {g}");
            }
        }
    }

    #[test]
    fn characters_match_matrix_traces_up_to_five_strands() {
        for n in 2..=5 {
            for g in partitions_of(n) {
                let m = build_irrep(&g).unwrap();
                for mu in partitions_of(n) {
                    let word = class_word(&mu, n);
                    let direct = word_trace(&m, word.letters()).unwrap();
                    let reduced = class_character(&g, &mu).unwrap();
                    assert_eq!(reduced, direct, "module {g}, class {mu}");
                }
            }
        }
    }

    #[test]
    fn word_traces_are_spelling_independent() {
        // Several spellings of conjugate words on four strands.
        let g = part("[2,2]");
        let spellings = [
            vec![1, 2, 3],
            vec![3, 2, 1],
            vec![2, 3, 1],
            vec![1, 3, 2],
            vec![2, 1, 3],
        ];
        let canonical = reduce_word_trace(&g, &GWord::new(vec![1, 2, 3])).unwrap();
        for letters in spellings {
            let value = reduce_word_trace(&g, &GWord::new(letters.clone())).unwrap();
            assert_eq!(value, canonical, "spelling {letters:?}");
        }
    }

    #[test]
    fn word_traces_match_matrix_traces_on_scrambled_words() {
        let words: Vec<Vec<usize>> = vec![
            vec![],
            vec![1],
            vec![1, 2, 1],
            vec![2, 1, 2, 3],
            vec![1, 2, 3, 2, 1],
            vec![3, 1, 2, 1, 3],
            vec![1, 2, 1, 3, 2, 1],
            vec![2, 3, 2, 1, 2, 3],
        ];
        for n in 4..=5 {
            for g in partitions_of(n) {
                let m = build_irrep(&g).unwrap();
                for letters in &words {
                    let direct = word_trace(&m, letters).unwrap();
                    let reduced = reduce_word_trace(&g, &GWord::new(letters.clone())).unwrap();
                    assert_eq!(reduced, direct, "module {g}, word {letters:?}");
                }
            }
        }
    }

    #[test]
    fn oversized_letters_are_rejected() {
        let g = part("[2,1]");
        let err = reduce_word_trace(&g, &GWord::new(vec![3])).unwrap_err();
        assert_eq!(
            err,
            CharactersError::SizeMismatch {
                expected: 3,
                found: 4
            }
        );
    }

    #[test]
    fn table_matches_single_entries_and_is_square() {
        let table = character_table(4).unwrap();
        assert_eq!(table.n(), 4);
        assert_eq!(table.labels().len(), 5);
        for g in table.labels() {
            for mu in table.labels() {
                assert_eq!(
                    table.entry(g, mu).unwrap(),
                    &class_character(g, mu).unwrap()
                );
            }
        }
    }

    #[test]
    fn sequential_and_parallel_tables_agree() {
        let a = character_table(5).unwrap();
        let b = character_table_seq(5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn table_serializes_deterministically() {
        let table = character_table(2).unwrap();
        let json = serde_json::to_string(&table).unwrap();
        assert_eq!(
            json,
            "{\"n\":2,\"modules\":[\"[2]\",\"[1,1]\"],\"classes\":[\"[2]\",\"[1,1]\"],\
             \"entries\":[[{\"1\":\"1/1\"},{\"0\":\"1/1\"}],[{\"0\":\"-1/1\"},{\"0\":\"1/1\"}]]}"
        );
        let csv = table.to_csv();
        assert_eq!(csv, "module,\"[2]\",\"[1,1]\"\n\"[2]\",q,1\n\"[1,1]\",-1,1\n");
    }

    #[test]
    fn five_strand_class_with_two_segments() {
        // Cross-check one nontrivial multi-segment value directly.
        let g = part("[3,2]");
        let m = build_irrep(&g).unwrap();
        let mu = part("[3,2]");
        let word = class_word(&mu, 5);
        assert_eq!(
            class_character(&g, &mu).unwrap(),
            word_trace(&m, word.letters()).unwrap()
        );
    }
}
