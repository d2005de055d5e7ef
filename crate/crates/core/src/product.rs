//! The state-weighted product `A × T × B_1 × ... × B_n` and its costs.
//!
//! A product state is the tuple `(hard state, TS state, soft states...)`; it
//! is accepting when the hard component is, and its weight vector records
//! which soft components are accepting in their own automata.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::automata::BuchiAutomaton;
use crate::error::{Error, Result};
use crate::graph::{tarjan, Component};
use crate::ltl::{satisfied_set, LassoWord, LtlFormula};
use crate::ts::TransitionSystem;

/// One Boolean per soft constraint, in priority order (index 0 is the most
/// important constraint).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct WeightVector(Vec<bool>);

impl WeightVector {
    pub fn new(bits: Vec<bool>) -> Self {
        WeightVector(bits)
    }

    pub fn all_false(n: usize) -> Self {
        WeightVector(vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Entry-wise disjunction.
    pub fn or_assign(&mut self, other: &WeightVector) {
        for (a, &b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    /// 1-based indices of the `T` entries.
    pub fn satisfied(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Entry `j` of the result is entry `order[j]` of `self` (0-based).
    pub fn permuted(&self, order: &[usize]) -> WeightVector {
        WeightVector(order.iter().map(|&i| self.0[i]).collect())
    }

    pub fn from_satisfied(n: usize, satisfied: &[usize]) -> WeightVector {
        let mut bits = vec![false; n];
        for &i in satisfied {
            bits[i - 1] = true;
        }
        WeightVector(bits)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "T" } else { "F" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for WeightVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'T' => Ok(true),
                'F' => Ok(false),
                _ => Err(Error::Schema(format!("bad weight character `{c}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(WeightVector)
    }
}

/// Value of `f(v) = Σ_{i : v[i] = F} n^(n-i)` (1-based `i`) together with
/// the vector it was computed from.
///
/// Costs over the same `n` compare exactly like their vectors under the
/// lexicographic order with `T < F` and earlier entries dominating, which
/// is how [`Ord`] is implemented.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cost {
    value: BigUint,
    vector: WeightVector,
}

impl Cost {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn vector(&self) -> &WeightVector {
        &self.vector
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.vector.len(), other.vector.len());
        // T < F per entry, first difference decides
        for (a, b) in self.vector.0.iter().zip(&other.vector.0) {
            match (a, b) {
                (true, false) => return Ordering::Less,
                (false, true) => return Ordering::Greater,
                _ => {}
            }
        }
        self.vector.len().cmp(&other.vector.len())
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub fn cost_of_vector(v: &WeightVector) -> Cost {
    let n = v.len();
    let base = BigUint::from(n);
    let value =
        v.0.iter()
            .enumerate()
            .filter(|(_, &b)| !b)
            .map(|(i, _)| base.pow((n - 1 - i) as u32))
            .sum();
    Cost {
        value,
        vector: v.clone(),
    }
}

/// Semantic cost of a word: the cost of the vector of soft formulas it
/// satisfies.
pub fn trace_cost(word: &LassoWord, softs: &[LtlFormula]) -> Cost {
    cost_of_vector(&WeightVector(satisfied_set(word, softs)))
}

/// Checks that `permutation` is a bijection on `1..=n` and returns it 0-based.
pub fn validate_permutation(permutation: &[usize], n: usize) -> Result<Vec<usize>> {
    if permutation.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "expected {n} entries, got {}",
            permutation.len()
        )));
    }
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for &p in permutation {
        if p == 0 || p > n || seen[p - 1] {
            return Err(Error::InvalidPermutation(format!("{p} is out of range or repeated")));
        }
        seen[p - 1] = true;
        order.push(p - 1);
    }
    Ok(order)
}

#[derive(Debug)]
struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    accepting: Vec<bool>,
    /// Flattened `(hard, ts, soft_1..soft_n)` tuples, when built from automata.
    tuples: Option<Vec<u32>>,
    /// Tarjan decomposition, computed on first use. It depends only on the
    /// graph, so it survives weight permutations.
    components: OnceLock<(Vec<Component>, Vec<bool>)>,
}

/// Reachable fragment of a product automaton, with integer state indices
/// assigned in breadth-first discovery order from the initial state.
#[derive(Clone, Debug)]
pub struct ProductAutomaton {
    graph: Arc<Graph>,
    init: usize,
    soft_count: usize,
    weights: Arc<PackedWeights>,
}

/// Weight vectors packed `words` u64s per state; bit `i % 64` of word
/// `i / 64` is entry `i`.
#[derive(Debug)]
struct PackedWeights {
    words: usize,
    bits: Vec<u64>,
}

impl PackedWeights {
    fn pack(n: usize, vectors: impl Iterator<Item = WeightVector>) -> Self {
        let words = n.div_ceil(64);
        let mut bits = Vec::new();
        for v in vectors {
            bits.extend(pack_vector(&v, words));
        }
        PackedWeights { words, bits }
    }

    fn get(&self, state: usize) -> &[u64] {
        &self.bits[state * self.words..(state + 1) * self.words]
    }
}

fn pack_vector(v: &WeightVector, words: usize) -> Vec<u64> {
    let mut out = vec![0u64; words];
    for (i, &b) in v.0.iter().enumerate() {
        if b {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

/// Unpacks `n` entries of a packed weight vector.
pub fn unpack_weight(words: &[u64], n: usize) -> WeightVector {
    WeightVector((0..n).map(|i| words[i / 64] >> (i % 64) & 1 == 1).collect())
}

/// Lexicographic comparison of packed weight vectors, `T < F` per entry,
/// consistent with comparing their costs.
pub fn compare_packed(a: &[u64], b: &[u64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let diff = x ^ y;
        if diff != 0 {
            let bit = 1u64 << diff.trailing_zeros();
            return if x & bit != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            };
        }
    }
    Ordering::Equal
}

impl ProductAutomaton {
    /// Assembles a product from explicit parts, keeping only the fragment
    /// reachable from `init`. States are renumbered in breadth-first order.
    pub fn from_parts(
        init: usize,
        successors: Vec<Vec<u32>>,
        accepting: Vec<bool>,
        weights: Vec<WeightVector>,
        tuples: Option<Vec<Vec<u32>>>,
    ) -> Result<Self> {
        let n = successors.len();
        if init >= n || accepting.len() != n || weights.len() != n {
            return Err(Error::Schema("inconsistent product parts".into()));
        }
        let soft_count = weights.first().map_or(0, WeightVector::len);
        if weights.iter().any(|w| w.len() != soft_count) {
            return Err(Error::Schema("weight vectors differ in length".into()));
        }
        if successors.iter().flatten().any(|&t| t as usize >= n) {
            return Err(Error::Schema("edge target out of range".into()));
        }
        if let Some(t) = &tuples {
            if t.len() != n || t.iter().any(|x| x.len() != soft_count + 2) {
                return Err(Error::Schema("state tuples do not match the product".into()));
            }
        }

        let mut renumber = vec![u32::MAX; n];
        let mut order = vec![init];
        renumber[init] = 0;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let mut succ = successors[v].clone();
            succ.sort_unstable();
            for w in succ {
                if renumber[w as usize] == u32::MAX {
                    renumber[w as usize] = order.len() as u32;
                    order.push(w as usize);
                }
            }
        }

        let mut offsets = Vec::with_capacity(order.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for &v in &order {
            let mut succ: Vec<u32> = successors[v].iter().map(|&w| renumber[w as usize]).collect();
            succ.sort_unstable();
            succ.dedup();
            targets.extend(succ);
            offsets.push(targets.len());
        }
        let graph = Graph {
            offsets,
            targets,
            accepting: order.iter().map(|&v| accepting[v]).collect(),
            tuples: tuples.map(|t| order.iter().flat_map(|&v| t[v].iter().copied()).collect()),
            components: OnceLock::new(),
        };
        Ok(ProductAutomaton {
            graph: Arc::new(graph),
            init: 0,
            soft_count,
            weights: Arc::new(PackedWeights::pack(
                soft_count,
                order.iter().map(|&v| weights[v].clone()),
            )),
        })
    }

    pub fn state_count(&self) -> usize {
        self.graph.accepting.len()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.targets.len()
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn soft_count(&self) -> usize {
        self.soft_count
    }

    /// Successors in ascending index order.
    pub fn successors(&self, state: usize) -> &[u32] {
        let g = &self.graph;
        &g.targets[g.offsets[state]..g.offsets[state + 1]]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.successors(from).binary_search(&(to as u32)).is_ok()
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.graph.accepting[state]
    }

    pub fn weight(&self, state: usize) -> WeightVector {
        unpack_weight(self.weights.get(state), self.soft_count)
    }

    pub fn weight_bit(&self, state: usize, i: usize) -> bool {
        self.weights.get(state)[i / 64] >> (i % 64) & 1 == 1
    }

    /// The packed form of [`Self::weight`], see [`compare_packed`].
    pub fn weight_words(&self, state: usize) -> &[u64] {
        self.weights.get(state)
    }

    /// `(hard, ts, soft_1..soft_n)` components of a state built from automata.
    pub fn tuple(&self, state: usize) -> Option<&[u32]> {
        let width = self.soft_count + 2;
        self.graph
            .tuples
            .as_ref()
            .map(|t| &t[state * width..(state + 1) * width])
    }

    pub fn ts_state(&self, state: usize) -> Option<usize> {
        self.tuple(state).map(|t| t[1] as usize)
    }

    /// SCCs reachable from the initial state in Tarjan completion order.
    pub fn components(&self) -> &[Component] {
        &self.component_table().0
    }

    /// Per component: contains an accepting state and has a cycle.
    pub fn component_accepting(&self) -> &[bool] {
        &self.component_table().1
    }

    fn component_table(&self) -> &(Vec<Component>, Vec<bool>) {
        self.graph.components.get_or_init(|| {
            let comps = tarjan(self.state_count(), &[self.init], |v| self.successors(v));
            let acc = comps
                .iter()
                .map(|c| {
                    let cyclic = c.members.len() > 1 || self.has_edge(c.leader, c.leader);
                    cyclic && c.members.iter().any(|&q| self.is_accepting(q))
                })
                .collect();
            (comps, acc)
        })
    }

    /// Same graph with every weight vector reordered: new entry `j` is old
    /// constraint `permutation[j]` (1-based). The graph itself is shared.
    pub fn with_permuted_weights(&self, permutation: &[usize]) -> Result<ProductAutomaton> {
        let order = validate_permutation(permutation, self.soft_count)?;
        Ok(ProductAutomaton {
            graph: Arc::clone(&self.graph),
            init: self.init,
            soft_count: self.soft_count,
            weights: Arc::new(permute_packed(&self.weights, &order)),
        })
    }
}

fn permute_packed(w: &PackedWeights, order: &[usize]) -> PackedWeights {
    let mut bits = vec![0u64; w.bits.len()];
    for (old, new) in w
        .bits
        .chunks_exact(w.words.max(1))
        .zip(bits.chunks_exact_mut(w.words.max(1)))
    {
        for (j, &i) in order.iter().enumerate() {
            if old[i / 64] >> (i % 64) & 1 == 1 {
                new[j / 64] |= 1 << (j % 64);
            }
        }
    }
    PackedWeights { words: w.words, bits }
}

/// Builds the reachable product of `hard`, `ts` and the nonblocking `softs`.
///
/// `((q, s, q⃗), (q', s', q⃗'))` is an edge iff `(s, s')` is a TS edge and every
/// automaton component moves on the letter `L(s)`.
pub fn build_product(
    hard: &BuchiAutomaton,
    ts: &TransitionSystem,
    softs: &[BuchiAutomaton],
) -> Result<ProductAutomaton> {
    let alphabet = ts.alphabet();
    if hard.alphabet() != alphabet {
        return Err(Error::AlphabetMismatch(
            "hard automaton alphabet differs from the transition system".into(),
        ));
    }
    for (i, b) in softs.iter().enumerate() {
        if b.alphabet() != alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "soft automaton {} alphabet differs from the transition system",
                i + 1
            )));
        }
        if !b.is_total() {
            return Err(Error::BlockingAutomaton(i + 1));
        }
    }

    let width = softs.len() + 2;
    let mut tuples: Vec<u32> = Vec::new();
    let mut ids: HashMap<Box<[u32]>, u32> = HashMap::new();
    let mut offsets = vec![0usize];
    let mut targets: Vec<u32> = Vec::new();

    let mut initial = Vec::with_capacity(width);
    initial.push(hard.init() as u32);
    initial.push(ts.init() as u32);
    initial.extend(softs.iter().map(|b| b.init() as u32));
    ids.insert(initial.clone().into_boxed_slice(), 0);
    tuples.extend(&initial);

    let mut current = 0usize;
    let mut choices: Vec<&[usize]> = Vec::with_capacity(width);
    let mut cursor = vec![0usize; width];
    let mut candidate = vec![0u32; width];
    let mut succ: Vec<u32> = Vec::new();
    let ts_succ: Vec<Vec<usize>> = (0..ts.state_count())
        .map(|s| ts.successors(s).iter().map(|&t| t as usize).collect())
        .collect();

    while current * width < tuples.len() {
        let tuple = tuples[current * width..(current + 1) * width].to_vec();
        let s = tuple[1] as usize;
        let label = ts.encoded_label(s);
        choices.clear();
        choices.push(hard.successors(tuple[0] as usize, label));
        choices.push(&ts_succ[s]);
        for (b, &q) in softs.iter().zip(&tuple[2..]) {
            choices.push(b.successors(q as usize, label));
        }
        succ.clear();
        if choices.iter().all(|c| !c.is_empty()) {
            cursor.iter_mut().for_each(|c| *c = 0);
            'product: loop {
                for k in 0..width {
                    candidate[k] = choices[k][cursor[k]] as u32;
                }
                let id = match ids.get(candidate.as_slice()) {
                    Some(&id) => id,
                    None => {
                        let id = (tuples.len() / width) as u32;
                        ids.insert(candidate.clone().into_boxed_slice(), id);
                        tuples.extend(&candidate);
                        id
                    }
                };
                succ.push(id);
                // odometer over the last component first
                let mut k = width;
                loop {
                    if k == 0 {
                        break 'product;
                    }
                    k -= 1;
                    cursor[k] += 1;
                    if cursor[k] < choices[k].len() {
                        break;
                    }
                    cursor[k] = 0;
                }
            }
        }
        succ.sort_unstable();
        succ.dedup();
        targets.extend(&succ);
        offsets.push(targets.len());
        current += 1;
    }

    let count = tuples.len() / width;
    let mut accepting = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for t in tuples.chunks_exact(width) {
        accepting.push(hard.is_accepting(t[0] as usize));
        weights.push(WeightVector(
            softs
                .iter()
                .zip(&t[2..])
                .map(|(b, &q)| b.is_accepting(q as usize))
                .collect(),
        ));
    }
    Ok(ProductAutomaton {
        graph: Arc::new(Graph {
            offsets,
            targets,
            accepting,
            tuples: Some(tuples),
            components: OnceLock::new(),
        }),
        init: 0,
        soft_count: softs.len(),
        weights: Arc::new(PackedWeights::pack(softs.len(), weights.into_iter())),
    })
}

/// JSON form of a product, also used as the re-synthesis cache.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductDump {
    pub format: u64,
    pub soft_count: usize,
    pub init: usize,
    pub states: Vec<ProductStateDump>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductStateDump {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple: Option<Vec<u32>>,
    pub weight: String,
    pub accepting: bool,
}

impl From<&ProductAutomaton> for ProductDump {
    fn from(p: &ProductAutomaton) -> Self {
        ProductDump {
            format: 1,
            soft_count: p.soft_count,
            init: p.init,
            states: (0..p.state_count())
                .map(|s| ProductStateDump {
                    tuple: p.tuple(s).map(<[u32]>::to_vec),
                    weight: p.weight(s).to_string(),
                    accepting: p.is_accepting(s),
                })
                .collect(),
            edges: (0..p.state_count())
                .flat_map(|s| p.successors(s).iter().map(move |&t| (s, t as usize)))
                .collect(),
        }
    }
}

impl TryFrom<ProductDump> for ProductAutomaton {
    type Error = Error;

    fn try_from(dump: ProductDump) -> Result<Self> {
        if dump.format != 1 {
            return Err(Error::FormatVersion(dump.format));
        }
        let n = dump.states.len();
        let mut successors = vec![Vec::new(); n];
        for &(a, b) in &dump.edges {
            if a >= n || b >= n {
                return Err(Error::Schema(format!("edge ({a}, {b}) out of range")));
            }
            successors[a].push(b as u32);
        }
        let weights = dump
            .states
            .iter()
            .map(|s| s.weight.parse())
            .collect::<Result<Vec<WeightVector>>>()?;
        if weights.iter().any(|w| w.len() != dump.soft_count) {
            return Err(Error::Schema("weight length differs from soft_count".into()));
        }
        let tuples = if dump.states.iter().all(|s| s.tuple.is_some()) && n > 0 {
            Some(dump.states.iter().map(|s| s.tuple.clone().unwrap()).collect())
        } else {
            None
        };
        let accepting = dump.states.iter().map(|s| s.accepting).collect();
        let mut p = ProductAutomaton::from_parts(dump.init, successors, accepting, weights, tuples)?;
        p.soft_count = dump.soft_count;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wv(s: &str) -> WeightVector {
        s.parse().unwrap()
    }

    #[test]
    fn cost_examples() {
        assert_eq!(cost_of_vector(&wv("TTT")).value(), &BigUint::from(0u32));
        assert_eq!(cost_of_vector(&wv("FTF")).value(), &BigUint::from(10u32));
        assert_eq!(cost_of_vector(&wv("TF")).value(), &BigUint::from(1u32));
        assert_eq!(cost_of_vector(&wv("FT")).value(), &BigUint::from(2u32));
        assert!(cost_of_vector(&wv("TF")) < cost_of_vector(&wv("FT")));
        assert_eq!(cost_of_vector(&WeightVector::default()).value(), &BigUint::from(0u32));
    }

    #[test]
    fn case_study_costs() {
        // satisfied {1,3} of 4: 4^2 + 4^0
        assert_eq!(cost_of_vector(&wv("TFTF")).value(), &BigUint::from(17u32));
        // satisfied {1,2,4,5} of 6: 6^3 + 6^0
        assert_eq!(cost_of_vector(&wv("TTFTTF")).value(), &BigUint::from(217u32));
    }

    #[test]
    fn wide_vectors_do_not_overflow() {
        let v = WeightVector::all_false(40);
        let c = cost_of_vector(&v);
        let expected: BigUint = (0..40u32).map(|e| BigUint::from(40u32).pow(e)).sum();
        assert_eq!(c.value(), &expected);
    }

    #[test]
    fn weight_vector_helpers() {
        let v = wv("TFT");
        assert_eq!(v.satisfied(), vec![1, 3]);
        assert_eq!(v.permuted(&[2, 0, 1]), wv("TTF"));
        assert_eq!(WeightVector::from_satisfied(3, &[1, 3]), v);
        let mut a = wv("TFF");
        a.or_assign(&wv("FFT"));
        assert_eq!(a, wv("TFT"));
        assert!("TX".parse::<WeightVector>().is_err());
    }

    #[test]
    fn permutations_are_validated() {
        assert_eq!(validate_permutation(&[2, 1, 3], 3).unwrap(), vec![1, 0, 2]);
        assert!(validate_permutation(&[1, 1, 3], 3).is_err());
        assert!(validate_permutation(&[1, 2], 3).is_err());
        assert!(validate_permutation(&[0, 1, 2], 3).is_err());
        assert!(validate_permutation(&[], 0).unwrap().is_empty());
    }

    #[test]
    fn from_parts_restricts_to_reachable() {
        let p = ProductAutomaton::from_parts(
            1,
            vec![vec![1], vec![2], vec![1]],
            vec![true, false, true],
            vec![wv("T"), wv("F"), wv("T")],
            None,
        )
        .unwrap();
        assert_eq!(p.state_count(), 2);
        assert_eq!(p.init(), 0);
        assert!(!p.is_accepting(0));
        assert!(p.is_accepting(1));
        assert_eq!(p.successors(0), &[1]);
        assert_eq!(p.successors(1), &[0]);
        assert!(p.ts_state(0).is_none());
    }

    #[test]
    fn dump_round_trip_preserves_graph() {
        let p = ProductAutomaton::from_parts(
            0,
            vec![vec![1, 0], vec![0]],
            vec![true, false],
            vec![wv("TF"), wv("FT")],
            Some(vec![vec![0, 0, 1, 1], vec![1, 0, 0, 1]]),
        )
        .unwrap();
        let dump = ProductDump::from(&p);
        let back = ProductAutomaton::try_from(dump.clone()).unwrap();
        assert_eq!(ProductDump::from(&back), dump);
    }
}
