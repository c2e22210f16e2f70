//! Token-level kernels, the nonstationary edge-gate extension, and
//! convolution kernels on tuple sequences and trees.
//!
//! The sequence kernel sums, over all pairs of equal-length (not necessarily
//! contiguous) subsequences, the product of tuple kernels weighted by
//! `decay^(l(i)+l(j))`, where `l(.)` is the index span of a subsequence
//! (last index minus first index, so single elements have span 0). It is
//! computed by dynamic programming in `O(|A|·|B|·L)` for maximum subsequence
//! length `L = min(|A|,|B|)`.
//!
//! The tree kernel is the recursive form
//! `K(x,y) = k(x,y)·(k(x,y) + C(x,y))` where `C` sums over pairs of child
//! subsequences of equal length and equal span, weighted by `decay^span`,
//! of (sum of subtree kernels) × (product of child tuple kernels). Node-pair
//! values are memoized within one invocation; there is no cross-call caching.
//!
//! Both convolution kernels can be cosine-normalized (`K/sqrt(Kaa·Kbb)`),
//! controlled by [`KernelParams::normalize`].

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structures::{EmbeddingTable, Structure, TokenTuple, TreeNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Gaussian,
    Sigmoid,
    Exact,
}

impl std::str::FromStr for TokenKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(TokenKind::Gaussian),
            "sigmoid" => Ok(TokenKind::Sigmoid),
            "exact" => Ok(TokenKind::Exact),
            other => Err(Error::invalid(format!("unknown token kernel `{other}`"))),
        }
    }
}

impl std::fmt::Display for TokenKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TokenKind::Gaussian => "gaussian",
            TokenKind::Sigmoid => "sigmoid",
            TokenKind::Exact => "exact",
        })
    }
}

/// Kernel parameters: token kernel kind, Gaussian bandwidth, subsequence
/// decay, per-edge-label nonstationarity gates, and normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub token_kind: TokenKind,
    pub bandwidth: f64,
    pub decay: f64,
    /// Binary gate per edge label; labels not present default to 1.
    pub ns_flags: BTreeMap<String, u8>,
    pub normalize: bool,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams {
            token_kind: TokenKind::Gaussian,
            bandwidth: 1.0,
            decay: 0.5,
            ns_flags: BTreeMap::new(),
            normalize: true,
        }
    }
}

impl KernelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(Error::invalid(format!(
                "decay must lie strictly inside (0,1), got {}",
                self.decay
            )));
        }
        if !(self.bandwidth > 0.0) || !self.bandwidth.is_finite() {
            return Err(Error::invalid(format!(
                "bandwidth must be positive and finite, got {}",
                self.bandwidth
            )));
        }
        for (label, &v) in &self.ns_flags {
            if v > 1 {
                return Err(Error::invalid(format!(
                    "nonstationarity flag for `{label}` must be 0 or 1, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Gate value for an edge label; unseen labels are fully active.
    pub fn sigma(&self, edge: &str) -> f64 {
        self.ns_flags.get(edge).map(|&v| v as f64).unwrap_or(1.0)
    }
}

/// Counts top-level kernel invocations. Safe to share across worker threads;
/// normalization self-similarities are bookkeeping and are not counted.
#[derive(Debug, Default)]
pub struct KernelStats(AtomicU64);

impl KernelStats {
    pub fn new() -> Self {
        KernelStats(AtomicU64::new(0))
    }

    pub fn count(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.0.store(0, Ordering::Relaxed);
    }

    fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }
}

/// Token-level kernel in `[0,1]`, symmetric in its arguments.
pub fn token_kernel(a: &str, b: &str, table: &EmbeddingTable, params: &KernelParams) -> f64 {
    match params.token_kind {
        TokenKind::Exact => {
            if a == b {
                1.0
            } else {
                0.0
            }
        }
        TokenKind::Gaussian => {
            let wa = table.lookup(a);
            let wb = table.lookup(b);
            let d2: f64 = wa.iter().zip(wb).map(|(x, y)| (x - y) * (x - y)).sum();
            (-d2 / (params.bandwidth * params.bandwidth)).exp()
        }
        TokenKind::Sigmoid => {
            let wa = table.lookup(a);
            let wb = table.lookup(b);
            let dot: f64 = wa.iter().zip(wb).map(|(x, y)| x * y).sum();
            (1.0 + dot.tanh()) / 2.0
        }
    }
}

/// Gated tuple kernel `sigma(e_i) * k_e(e_i,e_j) * sigma(e_j) * k_n(n_i,n_j)`.
/// The edge kernel is exact match; the node kernel follows `params.token_kind`.
pub fn tuple_kernel(
    ti: &TokenTuple,
    tj: &TokenTuple,
    table: &EmbeddingTable,
    params: &KernelParams,
) -> f64 {
    let gate = params.sigma(&ti.edge) * params.sigma(&tj.edge);
    if gate == 0.0 || ti.edge != tj.edge {
        return 0.0;
    }
    gate * token_kernel(&ti.node, &tj.node, table, params)
}

// ---------------------------------------------------------------------------
// Sequence (path) kernel
// ---------------------------------------------------------------------------

/// Unnormalized subsequence kernel over tuple slices. Empty inputs give 0.
pub fn path_kernel_tuples(
    a: &[TokenTuple],
    b: &[TokenTuple],
    table: &EmbeddingTable,
    params: &KernelParams,
) -> f64 {
    let n = a.len();
    let m = b.len();
    if n == 0 || m == 0 {
        return 0.0;
    }
    let lam = params.decay;
    let lam2 = lam * lam;
    let mut kmat = vec![0.0f64; n * m];
    for p in 0..n {
        for q in 0..m {
            kmat[p * m + q] = tuple_kernel(&a[p], &b[q], table, params);
        }
    }
    // Level 1: single-element pairs, span 0 on both sides.
    let mut level: Vec<f64> = kmat.clone();
    let mut total: f64 = level.iter().sum();
    let lmax = n.min(m);
    for _ in 2..=lmax {
        // g[p][q] = sum over p'<p, q'<q of lam^{(p-p')+(q-q')} * level[p'][q'],
        // built incrementally via inclusion-exclusion on the prefix sums.
        let mut g = vec![0.0f64; n * m];
        for p in 1..n {
            for q in 1..m {
                let mut v = lam * (g[(p - 1) * m + q] + g[p * m + q - 1])
                    - lam2 * g[(p - 1) * m + (q - 1)];
                v += lam2 * level[(p - 1) * m + (q - 1)];
                g[p * m + q] = v;
            }
        }
        let mut next = vec![0.0f64; n * m];
        let mut level_sum = 0.0;
        for p in 1..n {
            for q in 1..m {
                let v = kmat[p * m + q] * g[p * m + q];
                next[p * m + q] = v;
                level_sum += v;
            }
        }
        total += level_sum;
        // All contributions are nonnegative, so a zero level kills the rest.
        if level_sum == 0.0 {
            break;
        }
        level = next;
    }
    total
}

fn normalized(raw: f64, self_a: f64, self_b: f64) -> f64 {
    if self_a <= 0.0 || self_b <= 0.0 {
        0.0
    } else {
        raw / (self_a * self_b).sqrt()
    }
}

/// Sequence kernel on structures; errors unless both are paths.
pub fn path_kernel(
    si: &Structure,
    sj: &Structure,
    table: &EmbeddingTable,
    params: &KernelParams,
) -> Result<f64> {
    match (si, sj) {
        (Structure::Path(a), Structure::Path(b)) => {
            let raw = path_kernel_tuples(a, b, table, params);
            if params.normalize {
                Ok(normalized(
                    raw,
                    path_kernel_tuples(a, a, table, params),
                    path_kernel_tuples(b, b, table, params),
                ))
            } else {
                Ok(raw)
            }
        }
        _ => Err(Error::VariantMismatch {
            expected: "path",
            got: if matches!(si, Structure::Path(_)) {
                sj.kind().name()
            } else {
                si.kind().name()
            },
        }),
    }
}

// ---------------------------------------------------------------------------
// Tree kernel
// ---------------------------------------------------------------------------

struct TreeIndex<'a> {
    nodes: Vec<&'a TreeNode>,
    children: Vec<Vec<usize>>,
}

fn index_tree(root: &TreeNode) -> TreeIndex<'_> {
    let mut ix = TreeIndex {
        nodes: Vec::new(),
        children: Vec::new(),
    };
    fn walk<'a>(n: &'a TreeNode, ix: &mut TreeIndex<'a>) -> usize {
        let id = ix.nodes.len();
        ix.nodes.push(n);
        ix.children.push(Vec::new());
        for c in &n.children {
            let ci = walk(c, ix);
            ix.children[id].push(ci);
        }
        id
    }
    walk(root, &mut ix);
    ix
}

struct TreeKernelCtx<'a> {
    ia: TreeIndex<'a>,
    ib: TreeIndex<'a>,
    table: &'a EmbeddingTable,
    params: &'a KernelParams,
    memo: Vec<f64>, // NaN = not computed
    nb: usize,
}

impl TreeKernelCtx<'_> {
    fn node_pair(&mut self, x: usize, y: usize) -> f64 {
        let slot = x * self.nb + y;
        let cached = self.memo[slot];
        if !cached.is_nan() {
            return cached;
        }
        let krr = tuple_kernel(
            &self.ia.nodes[x].tuple,
            &self.ib.nodes[y].tuple,
            self.table,
            self.params,
        );
        let val = if krr == 0.0 {
            0.0
        } else {
            let c = self.child_sum(x, y);
            krr * (krr + c)
        };
        self.memo[slot] = val;
        val
    }

    /// Sum over pairs of equal-length, equal-span child subsequences of
    /// `decay^span * (sum of subtree kernels) * (product of child tuple kernels)`.
    fn child_sum(&mut self, x: usize, y: usize) -> f64 {
        let ca = self.ia.children[x].clone();
        let cb = self.ib.children[y].clone();
        if ca.is_empty() || cb.is_empty() {
            return 0.0;
        }
        let lam = self.params.decay;
        let mut total = 0.0;
        let tmax = ca.len().min(cb.len());
        for t in 1..=tmax {
            for comb_a in (0..ca.len()).combinations(t) {
                let span_a = comb_a[t - 1] - comb_a[0];
                for comb_b in (0..cb.len()).combinations(t) {
                    if comb_b[t - 1] - comb_b[0] != span_a {
                        continue;
                    }
                    let mut prod = lam.powi(span_a as i32);
                    for s in 0..t {
                        prod *= tuple_kernel(
                            &self.ia.nodes[ca[comb_a[s]]].tuple,
                            &self.ib.nodes[cb[comb_b[s]]].tuple,
                            self.table,
                            self.params,
                        );
                        if prod == 0.0 {
                            break;
                        }
                    }
                    if prod == 0.0 {
                        continue;
                    }
                    let ksum: f64 = (0..t)
                        .map(|s| self.node_pair(ca[comb_a[s]], cb[comb_b[s]]))
                        .sum();
                    total += prod * ksum;
                }
            }
        }
        total
    }
}

/// Unnormalized tree kernel between two roots.
pub fn tree_kernel_nodes(
    a: &TreeNode,
    b: &TreeNode,
    table: &EmbeddingTable,
    params: &KernelParams,
) -> f64 {
    let ia = index_tree(a);
    let ib = index_tree(b);
    let na = ia.nodes.len();
    let nb = ib.nodes.len();
    let mut ctx = TreeKernelCtx {
        ia,
        ib,
        table,
        params,
        memo: vec![f64::NAN; na * nb],
        nb,
    };
    ctx.node_pair(0, 0)
}

/// Tree kernel on structures; errors unless both are trees.
pub fn tree_kernel(
    si: &Structure,
    sj: &Structure,
    table: &EmbeddingTable,
    params: &KernelParams,
) -> Result<f64> {
    match (si, sj) {
        (Structure::Tree(a), Structure::Tree(b)) => {
            let raw = tree_kernel_nodes(a, b, table, params);
            if params.normalize {
                Ok(normalized(
                    raw,
                    tree_kernel_nodes(a, a, table, params),
                    tree_kernel_nodes(b, b, table, params),
                ))
            } else {
                Ok(raw)
            }
        }
        _ => Err(Error::VariantMismatch {
            expected: "tree",
            got: if matches!(si, Structure::Tree(_)) {
                sj.kind().name()
            } else {
                si.kind().name()
            },
        }),
    }
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

/// Unnormalized self-similarity `K_raw(s,s)`; used to cache normalization
/// denominators. Not counted by [`KernelStats`].
pub fn self_kernel_raw(s: &Structure, table: &EmbeddingTable, params: &KernelParams) -> f64 {
    match s {
        Structure::Path(a) => path_kernel_tuples(a, a, table, params),
        Structure::Tree(a) => tree_kernel_nodes(a, a, table, params),
    }
}

/// Structure kernel with caller-supplied self-similarities for normalization.
/// Counts as one kernel invocation.
pub fn kernel_with_norms(
    si: &Structure,
    sj: &Structure,
    self_i: f64,
    self_j: f64,
    table: &EmbeddingTable,
    params: &KernelParams,
    stats: &KernelStats,
) -> Result<f64> {
    stats.bump();
    let raw = match (si, sj) {
        (Structure::Path(a), Structure::Path(b)) => path_kernel_tuples(a, b, table, params),
        (Structure::Tree(a), Structure::Tree(b)) => tree_kernel_nodes(a, b, table, params),
        _ => {
            return Err(Error::VariantMismatch {
                expected: si.kind().name(),
                got: sj.kind().name(),
            })
        }
    };
    if params.normalize {
        Ok(normalized(raw, self_i, self_j))
    } else {
        Ok(raw)
    }
}

/// Structure kernel: dispatches on the variant and counts one invocation.
pub fn kernel(
    si: &Structure,
    sj: &Structure,
    table: &EmbeddingTable,
    params: &KernelParams,
    stats: &KernelStats,
) -> Result<f64> {
    let (self_i, self_j) = if params.normalize {
        if si.kind() != sj.kind() {
            // Let the dispatch below produce the mismatch error; the call
            // still counts.
            (0.0, 0.0)
        } else {
            (
                self_kernel_raw(si, table, params),
                self_kernel_raw(sj, table, params),
            )
        }
    } else {
        (0.0, 0.0)
    };
    kernel_with_norms(si, sj, self_i, self_j, table, params, stats)
}
