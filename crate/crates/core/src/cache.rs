//! Compact re-planning cache.
//!
//! Re-planning under a new priority order only ever looks at the BFS tree
//! from the initial state (for prefixes) and at the accepting SCCs (for the
//! optimal component and its cycle). This keeps exactly that, so a product
//! with millions of edges shrinks to a binary file that loads in
//! milliseconds and yields the same lassos as [`crate::synthesis::resynthesize_with_priorities`].

use std::ops::Range;

use crate::error::{Error, Result};
use crate::graph::bfs_tree;
use crate::product::{compare_packed, validate_permutation, ProductAutomaton};
use crate::synthesis::{local_csr, plan_in_scc, Lasso, MidpointRule, SccIndex};
use crate::ts::TsPath;

const FORMAT: u32 = 1;
const MAGIC: &[u8; 8] = b"SOFTLTLC";

struct Writer<'a>(&'a mut Vec<u8>);

impl Writer<'_> {
    fn u64(&mut self, x: u64) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }

    fn u32s(&mut self, xs: &[u32]) {
        self.u64(xs.len() as u64);
        for &x in xs {
            self.0.extend_from_slice(&x.to_le_bytes());
        }
    }
}

struct Reader<'a>(&'a [u8]);

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.0.len() < n {
            return Err(Error::Schema("re-planning cache is truncated".into()));
        }
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Ok(head)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Schema("re-planning cache: value out of range".into()))
    }

    fn u32s(&mut self) -> Result<Vec<u32>> {
        let n = self.usize()?;
        let bytes = self.take(
            n.checked_mul(4)
                .ok_or_else(|| Error::Schema("re-planning cache: bad length".into()))?,
        )?;
        Ok(bytes
            .chunks_exact(4)
            .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
            .collect())
    }
}

/// One accepting SCC: members ascending, packed weight words per member,
/// and the internal edges as CSR over local indices.
#[derive(Clone, Debug, PartialEq, Eq)]
struct CachedScc {
    leader: usize,
    leader_number: usize,
    members: Vec<usize>,
    accepting: Vec<bool>,
    weights: Vec<u64>,
    offsets: Vec<u32>,
    /// Byte range of the little-endian edge targets in `edge_bytes`,
    /// decoded only for the component that wins.
    edges: Range<usize>,
}

#[derive(Clone, Debug)]
pub struct ReplanCache {
    format: u32,
    init: usize,
    soft_count: usize,
    /// BFS parent of every product state (the initial state is its own).
    parent: Vec<u32>,
    /// TS component per product state; empty for synthetic products.
    ts_state: Vec<u32>,
    sccs: Vec<CachedScc>,
    edge_bytes: Vec<u8>,
}

impl PartialEq for ReplanCache {
    fn eq(&self, other: &Self) -> bool {
        let scc_eq = |a: &CachedScc, b: &CachedScc| {
            (
                a.leader,
                a.leader_number,
                &a.members,
                &a.accepting,
                &a.weights,
                &a.offsets,
            ) == (
                b.leader,
                b.leader_number,
                &b.members,
                &b.accepting,
                &b.weights,
                &b.offsets,
            ) && self.edge_bytes[a.edges.clone()] == other.edge_bytes[b.edges.clone()]
        };
        (self.format, self.init, self.soft_count, &self.parent, &self.ts_state)
            == (
                other.format,
                other.init,
                other.soft_count,
                &other.parent,
                &other.ts_state,
            )
            && self.sccs.len() == other.sccs.len()
            && self.sccs.iter().zip(&other.sccs).all(|(a, b)| scc_eq(a, b))
    }
}

impl Eq for ReplanCache {}

impl ReplanCache {
    pub fn from_product(p: &ProductAutomaton) -> Self {
        let n = p.state_count();
        let (parent, _) = bfs_tree(n, p.init(), |v| p.successors(v), |_| true);
        let ts_state = if n > 0 && p.ts_state(0).is_some() {
            (0..n).map(|q| p.ts_state(q).unwrap_or(0) as u32).collect()
        } else {
            Vec::new()
        };
        let mut edge_bytes = Vec::new();
        let sccs = p
            .components()
            .iter()
            .zip(p.component_accepting())
            .filter(|(_, &acc)| acc)
            .map(|(c, _)| {
                let (offsets, edges) = local_csr(p, &c.members);
                let start = edge_bytes.len();
                edge_bytes.extend(edges.iter().flat_map(|e| e.to_le_bytes()));
                CachedScc {
                    leader: c.leader,
                    leader_number: c.leader_number,
                    members: c.members.clone(),
                    accepting: c.members.iter().map(|&q| p.is_accepting(q)).collect(),
                    weights: c
                        .members
                        .iter()
                        .flat_map(|&q| p.weight_words(q).iter().copied())
                        .collect(),
                    offsets,
                    edges: start..edge_bytes.len(),
                }
            })
            .collect();
        ReplanCache {
            format: FORMAT,
            init: p.init(),
            soft_count: p.soft_count(),
            parent: parent.iter().map(|&v| v as u32).collect(),
            ts_state,
            sccs,
            edge_bytes,
        }
    }

    pub fn soft_count(&self) -> usize {
        self.soft_count
    }

    pub fn state_count(&self) -> usize {
        self.parent.len()
    }

    /// Largest TS state index referenced, if the product came from a TS.
    pub fn max_ts_state(&self) -> Option<usize> {
        self.ts_state.iter().max().map(|&s| s as usize)
    }

    /// Binary encoding: the magic bytes, then little-endian `u64` scalars
    /// and length-prefixed arrays in field order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 4 * self.parent.len() * 2);
        out.extend_from_slice(MAGIC);
        let mut w = Writer(&mut out);
        w.u64(self.format as u64);
        w.u64(self.init as u64);
        w.u64(self.soft_count as u64);
        w.u32s(&self.parent);
        w.u32s(&self.ts_state);
        w.u64(self.sccs.len() as u64);
        for c in &self.sccs {
            w.u64(c.leader as u64);
            w.u64(c.leader_number as u64);
            w.u32s(&c.members.iter().map(|&q| q as u32).collect::<Vec<_>>());
            w.0.extend(c.accepting.iter().map(|&a| a as u8));
            w.u64(c.weights.len() as u64);
            for &x in &c.weights {
                w.u64(x);
            }
            w.u32s(&c.offsets);
            w.u64((c.edges.len() / 4) as u64);
            w.0.extend_from_slice(&self.edge_bytes[c.edges.clone()]);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::from_vec(bytes.to_vec())
    }

    /// Like `from_bytes`, but keeps the buffer and reads edges in place.
    pub fn from_vec(bytes: Vec<u8>) -> Result<Self> {
        let body = bytes
            .strip_prefix(MAGIC.as_slice())
            .ok_or_else(|| Error::Schema("not a re-planning cache".into()))?;
        let mut r = Reader(body);
        let format = r.u64()?;
        if format != FORMAT as u64 {
            return Err(Error::Schema(format!("re-planning cache: unsupported format {format}")));
        }
        let init = r.usize()?;
        let soft_count = r.usize()?;
        let parent = r.u32s()?;
        let ts_state = r.u32s()?;
        let count = r.usize()?;
        let mut sccs = Vec::new();
        for _ in 0..count {
            let leader = r.usize()?;
            let leader_number = r.usize()?;
            let members: Vec<usize> = r.u32s()?.into_iter().map(|q| q as usize).collect();
            let k = members.len();
            let accepting = r.take(k)?.iter().map(|&b| b != 0).collect();
            let w = r.usize()?;
            let weights = (0..w).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
            let offsets = r.u32s()?;
            let m = r.usize()?;
            let start = bytes.len() - r.0.len();
            r.take(
                m.checked_mul(4)
                    .ok_or_else(|| Error::Schema("re-planning cache: bad length".into()))?,
            )?;
            let edges = start..start + 4 * m;
            sccs.push(CachedScc {
                leader,
                leader_number,
                members,
                accepting,
                weights,
                offsets,
                edges,
            });
        }
        if !r.0.is_empty() {
            return Err(Error::Schema("re-planning cache: trailing bytes".into()));
        }
        let cache = ReplanCache {
            format: FORMAT,
            init,
            soft_count,
            parent,
            ts_state,
            sccs,
            edge_bytes: bytes,
        };
        cache.validate()?;
        Ok(cache)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Schema(format!("re-planning cache: {m}")));
        if self.format != FORMAT {
            return bad(&format!("unsupported format {}", self.format));
        }
        let n = self.parent.len();
        if self.init >= n || self.parent[self.init] as usize != self.init {
            return bad("bad initial state");
        }
        if self.parent.iter().any(|&v| v as usize >= n) {
            return bad("parent out of range");
        }
        if !self.ts_state.is_empty() && self.ts_state.len() != n {
            return bad("ts_state has the wrong length");
        }
        let words = self.soft_count.div_ceil(64);
        for c in &self.sccs {
            let k = c.members.len();
            let sorted = c.members.windows(2).all(|w| w[0] < w[1]);
            if k == 0
                || !sorted
                || c.members[k - 1] >= n
                || c.accepting.len() != k
                || c.offsets.len() != k + 1
                || c.offsets[0] != 0
                || c.offsets.windows(2).any(|w| w[0] > w[1])
                || c.offsets[k] as usize * 4 != c.edges.len()
                || c.weights.len() != k * words
                || c.members.binary_search(&c.leader).is_err()
            {
                return bad("malformed component");
            }
        }
        Ok(())
    }

    fn prefix_to(&self, m: usize) -> Vec<usize> {
        let mut path = vec![m];
        let mut v = m;
        // The validated tree may still contain a cycle; cap the walk.
        while v != self.init && path.len() <= self.parent.len() {
            v = self.parent[v] as usize;
            path.push(v);
        }
        path.reverse();
        path
    }

    /// Greedy lasso under the priority order `permutation` (1-based old
    /// indices), identical to re-synthesizing on the full product.
    pub fn replan(&self, permutation: &[usize], midpoint_variant: bool) -> Result<Option<Lasso>> {
        let order = validate_permutation(permutation, self.soft_count)?;
        let words = self.soft_count.div_ceil(64);
        let permute = |c: &CachedScc| -> Vec<u64> {
            let mut out = vec![0u64; c.weights.len()];
            if words == 0 {
                return out;
            }
            for (old, new) in c.weights.chunks_exact(words).zip(out.chunks_exact_mut(words)) {
                for (j, &i) in order.iter().enumerate() {
                    if old[i / 64] >> (i % 64) & 1 == 1 {
                        new[j / 64] |= 1 << (j % 64);
                    }
                }
            }
            out
        };
        let combined = |w: &[u64]| -> Vec<u64> {
            let mut acc = vec![0u64; words];
            for chunk in w.chunks_exact(words.max(1)).filter(|_| words > 0) {
                for (a, b) in acc.iter_mut().zip(chunk) {
                    *a |= b;
                }
            }
            acc
        };

        let mut best: Option<(usize, Vec<u64>, Vec<u64>)> = None;
        for (k, c) in self.sccs.iter().enumerate() {
            let w = permute(c);
            let total = combined(&w);
            let better = match &best {
                None => true,
                Some((b, _, bw)) => compare_packed(&total, bw)
                    .then(c.leader_number.cmp(&self.sccs[*b].leader_number))
                    .is_lt(),
            };
            if better {
                best = Some((k, w, total));
            }
        }
        let Some((k, weights, total)) = best else {
            return Ok(None);
        };
        let c = &self.sccs[k];

        let member_words = |i: usize| &weights[i * words..(i + 1) * words];
        let mut targets = vec![(0..c.members.len())
            .filter(|&i| c.accepting[i])
            .map(|i| c.members[i])
            .collect::<Vec<_>>()];
        for bit in 0..self.soft_count {
            if total[bit / 64] >> (bit % 64) & 1 == 1 {
                targets.push(
                    (0..c.members.len())
                        .filter(|&i| member_words(i)[bit / 64] >> (bit % 64) & 1 == 1)
                        .map(|i| c.members[i])
                        .collect(),
                );
            }
        }
        let edges: Vec<u32> = self.edge_bytes[c.edges.clone()]
            .chunks_exact(4)
            .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        if edges.iter().any(|&w| w as usize >= c.members.len()) {
            return Err(Error::Schema("re-planning cache: edge target out of range".into()));
        }
        let index = SccIndex::from_local(c.members.clone(), c.offsets.clone(), edges, &targets);
        let words_of = |q: usize| match c.members.binary_search(&q) {
            Ok(i) => member_words(i),
            Err(_) => &[][..],
        };
        let finish =
            |prefix: Vec<usize>, cycle: Vec<usize>| Lasso::with_weights(prefix, cycle, self.soft_count, words_of);
        Ok(plan_in_scc(
            &index,
            c.leader,
            targets.len(),
            MidpointRule::from_flag(midpoint_variant),
            |m| Some(self.prefix_to(m)),
            finish,
        ))
    }

    /// TS projection of a lasso found by [`ReplanCache::replan`].
    pub fn project(&self, lasso: &Lasso) -> Result<TsPath> {
        if self.ts_state.is_empty() {
            return Err(Error::InvalidPath("product has no transition-system component".into()));
        }
        let project = |v: &[usize]| v.iter().map(|&q| self.ts_state[q] as usize).collect();
        Ok(TsPath {
            prefix: project(&lasso.prefix),
            cycle: project(&lasso.cycle),
        })
    }
}
