//! Isomorph-free generation of semistable (pointed) graphs and of
//! contractible semistable decorated trees.
//!
//! Graphs are generated degree sequence first: every admissible multiset of
//! `(indegree, outdegree)` pairs with `|E| = |V| + k` is expanded into all
//! multiplicity matrices with those margins, and the results are
//! deduplicated by canonical key.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num::{BigInt, BigRational, One, ToPrimitive, Zero};

use crate::canonical::{canonical_form, canonicalize, CanonicalKey};
use crate::error::{domain, Error, Result};
use crate::graph::{Digraph, GraphLike, PointedGraph};
use crate::stabilize::stabilize_unchecked;

/// Resource ceilings for the exhaustive generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_weight: usize,
    /// Ceiling on `k + m` for decorated trees.
    pub max_legs: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_weight: 4,
            max_legs: 10,
        }
    }
}

impl Limits {
    fn check_weight(&self, k: usize) -> Result<()> {
        if k > self.max_weight {
            return Err(Error::Capacity {
                what: "weight",
                requested: k,
                limit: self.max_weight,
            });
        }
        Ok(())
    }

    fn check_legs(&self, legs: usize) -> Result<()> {
        if legs > self.max_legs {
            return Err(Error::Capacity {
                what: "k + m",
                requested: legs,
                limit: self.max_legs,
            });
        }
        Ok(())
    }
}

/// Filters applied on top of semistability.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct EnumOptions {
    pub stable: bool,
    pub strong: bool,
    pub balanced: bool,
    pub stabilizable: bool,
}

impl EnumOptions {
    pub fn stable() -> Self {
        EnumOptions {
            stable: true,
            ..Default::default()
        }
    }
    pub fn strong() -> Self {
        EnumOptions {
            strong: true,
            ..Default::default()
        }
    }
    pub fn with_stable(mut self) -> Self {
        self.stable = true;
        self
    }
    pub fn with_strong(mut self) -> Self {
        self.strong = true;
        self
    }
    pub fn with_balanced(mut self) -> Self {
        self.balanced = true;
        self
    }
    pub fn with_stabilizable(mut self) -> Self {
        self.stabilizable = true;
        self
    }
}

type CacheKey = (bool, usize, EnumOptions);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<Vec<Digraph>>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Vec<Digraph>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// All semistable graphs of weight `k` (up to isomorphism) satisfying `opts`,
/// in canonical form, sorted by vertex count, edge count and key.
pub fn semistable_graphs(k: usize, opts: EnumOptions) -> Result<Vec<Digraph>> {
    enumerate_graphs(k, opts, &Limits::default())
}

/// Pointed analogue of [`semistable_graphs`]; ordinary vertices only are
/// constrained and `k = 0` is allowed.
pub fn semistable_pointed_graphs(k: usize, opts: EnumOptions) -> Result<Vec<PointedGraph>> {
    enumerate_graphs(k, opts, &Limits::default())
}

pub fn enumerate_graphs<G: GraphLike>(k: usize, opts: EnumOptions, limits: &Limits) -> Result<Vec<G>> {
    limits.check_weight(k)?;
    if !G::POINTED && k == 0 {
        return domain("plain semistable graphs have weight at least 1");
    }
    let key = (G::POINTED, k, opts);
    let cached = cache().lock().expect("cache poisoned").get(&key).cloned();
    let raw = match cached {
        Some(v) => v,
        None => {
            let v = Arc::new(generate(G::POINTED, k, opts));
            cache().lock().expect("cache poisoned").insert(key, v.clone());
            v
        }
    };
    raw.iter().cloned().map(G::from_digraph).collect()
}

fn generate(pointed: bool, k: usize, opts: EnumOptions) -> Vec<Digraph> {
    let min_deg = if opts.stable { 4 } else { 3 };
    let mut tasks: Vec<Vec<(usize, usize)>> = Vec::new();
    // (in, out) of the distinguished vertex
    let point_pairs: Vec<Option<(usize, usize)>> = if pointed {
        let max = 2 * k;
        let mut v = Vec::new();
        for i in 0..=max {
            for o in 0..=max - i {
                v.push(Some((i, o)));
            }
        }
        v
    } else {
        vec![None]
    };
    for p in point_pairs {
        let dp = p.map_or(0, |(i, o)| i + o);
        let denom = min_deg - 2;
        if 2 * k < dp {
            continue;
        }
        let max_n = (2 * k - dp) / denom;
        for n in 0..=max_n {
            if !pointed && n == 0 {
                continue;
            }
            let e = n + k;
            let (pi, po) = p.unwrap_or((0, 0));
            if pi > e || po > e {
                continue;
            }
            if opts.strong && pointed && n > 0 && (pi == 0 || po == 0) {
                continue;
            }
            if opts.balanced && pi != po {
                continue;
            }
            let mut seq = Vec::new();
            ordinary_sequences(n, e - pi, e - po, opts, min_deg, usize::MAX, &mut seq, &mut |s| {
                let mut full = Vec::with_capacity(s.len() + 1);
                if let Some(pp) = p {
                    full.push(pp);
                }
                full.extend_from_slice(s);
                tasks.push(full);
            });
        }
    }

    let run = |degs: &Vec<(usize, usize)>| -> Vec<(CanonicalKey, Digraph)> {
        let mut found: HashMap<CanonicalKey, Digraph> = HashMap::new();
        fill_matrices(degs, &mut |m| {
            let d = Digraph::from_multiplicities(m);
            if let Some(kd) = accept(pointed, d, opts) {
                found.entry(kd.0).or_insert(kd.1);
            }
        });
        found.into_iter().collect()
    };

    #[cfg(feature = "parallel")]
    let parts: Vec<Vec<(CanonicalKey, Digraph)>> = {
        use rayon::prelude::*;
        tasks.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Vec<(CanonicalKey, Digraph)>> = tasks.iter().map(run).collect();

    let mut all: BTreeMap<(usize, usize, CanonicalKey), Digraph> = BTreeMap::new();
    for (key, d) in parts.into_iter().flatten() {
        all.insert((d.vertex_count(), d.edge_count(), key), d);
    }
    all.into_values().collect()
}

fn accept(pointed: bool, d: Digraph, opts: EnumOptions) -> Option<(CanonicalKey, Digraph)> {
    if opts.strong && !d.is_strong() {
        return None;
    }
    if pointed {
        let g = PointedGraph::new(d).ok()?;
        if opts.stabilizable && !stabilize_unchecked(&g).stabilizable {
            return None;
        }
        let (k, c) = canonicalize(&g);
        Some((k, c.graph().clone()))
    } else {
        if opts.stabilizable && !stabilize_unchecked(&d).stabilizable {
            return None;
        }
        Some(canonicalize(&d))
    }
}

/// Non-increasing sequences of ordinary `(in, out)` pairs with the given sums.
#[allow(clippy::too_many_arguments)]
fn ordinary_sequences(
    n: usize,
    in_sum: usize,
    out_sum: usize,
    opts: EnumOptions,
    min_deg: usize,
    bound: usize,
    cur: &mut Vec<(usize, usize)>,
    emit: &mut impl FnMut(&[(usize, usize)]),
) {
    if n == 0 {
        if in_sum == 0 && out_sum == 0 {
            emit(cur);
        }
        return;
    }
    let lo = if opts.stable { 2 } else { 1 };
    if in_sum < lo * n || out_sum < lo * n {
        return;
    }
    let max_in = in_sum - lo * (n - 1);
    let max_out = out_sum - lo * (n - 1);
    for i in lo..=max_in {
        for o in lo..=max_out {
            if i + o < min_deg {
                continue;
            }
            if opts.balanced && i != o {
                continue;
            }
            let code = i * 1000 + o;
            if code > bound {
                continue;
            }
            cur.push((i, o));
            ordinary_sequences(n - 1, in_sum - i, out_sum - o, opts, min_deg, code, cur, emit);
            cur.pop();
        }
    }
}

/// Every non-negative integer matrix with row sums `out` and column sums `in`.
fn fill_matrices(degs: &[(usize, usize)], emit: &mut impl FnMut(&[Vec<u32>])) {
    let n = degs.len();
    let mut m = vec![vec![0u32; n]; n];
    let mut col_rem: Vec<usize> = degs.iter().map(|d| d.0).collect();
    let row_req: Vec<usize> = degs.iter().map(|d| d.1).collect();
    fill_cell(0, 0, row_req[0], &row_req, &mut col_rem, &mut m, emit);
}

fn fill_cell(
    r: usize,
    c: usize,
    row_rem: usize,
    row_req: &[usize],
    col_rem: &mut Vec<usize>,
    m: &mut Vec<Vec<u32>>,
    emit: &mut impl FnMut(&[Vec<u32>]),
) {
    let n = row_req.len();
    if r == n {
        if col_rem.iter().all(|&x| x == 0) {
            emit(m);
        }
        return;
    }
    if c == n - 1 {
        if row_rem > col_rem[c] {
            return;
        }
        m[r][c] = row_rem as u32;
        col_rem[c] -= row_rem;
        // every column must still be completable by the remaining rows
        let rows_left: usize = row_req[r + 1..].iter().sum();
        if col_rem.iter().sum::<usize>() == rows_left {
            let next = if r + 1 < n { row_req[r + 1] } else { 0 };
            fill_cell(r + 1, 0, next, row_req, col_rem, m, emit);
        }
        col_rem[c] += row_rem;
        m[r][c] = 0;
        return;
    }
    let max = row_rem.min(col_rem[c]);
    for x in 0..=max {
        m[r][c] = x as u32;
        col_rem[c] -= x;
        fill_cell(r, c + 1, row_rem - x, row_req, col_rem, m, emit);
        col_rem[c] += x;
    }
    m[r][c] = 0;
}

/// A stable graph together with the semistable graphs stabilizing to it.
#[derive(Clone, Debug)]
pub struct Fiber<G> {
    pub stable: G,
    pub members: Vec<G>,
}

/// Partitions the stabilizable semistable graphs of weight `k` that satisfy
/// `opts` by their stabilization.
pub fn stabilization_fibers<G: GraphLike>(
    k: usize,
    opts: EnumOptions,
    limits: &Limits,
) -> Result<BTreeMap<CanonicalKey, Fiber<G>>> {
    let graphs: Vec<G> = enumerate_graphs(k, opts.with_stabilizable(), limits)?;
    let mut fibers: BTreeMap<CanonicalKey, Fiber<G>> = BTreeMap::new();
    for g in graphs {
        let s = stabilize_unchecked(&g)
            .stable_graph
            .expect("filtered to stabilizable graphs");
        let key = canonical_form(&s).key;
        fibers
            .entry(key)
            .or_insert_with(|| Fiber {
                stable: s,
                members: Vec::new(),
            })
            .members
            .push(g);
    }
    Ok(fibers)
}

// ---------------------------------------------------------------------------
// Decorated trees

/// A directed tree whose vertices carry labelled external legs.
///
/// Outward legs carry the unbarred labels `0..k`, inward legs the barred
/// labels `0..m`; every label is used exactly once. When `pointed` is set,
/// vertex `0` is distinguished.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecoratedTree {
    pub tree: Digraph,
    pub out_legs: Vec<Vec<usize>>,
    pub in_legs: Vec<Vec<usize>>,
    pub pointed: bool,
}

impl DecoratedTree {
    pub fn vertex_count(&self) -> usize {
        self.tree.vertex_count()
    }

    /// `(indegree, outdegree)` counting legs as half-edges.
    pub fn degrees(&self) -> Vec<(usize, usize)> {
        self.tree
            .degree_table()
            .into_iter()
            .enumerate()
            .map(|(v, (i, o))| (i + self.in_legs[v].len(), o + self.out_legs[v].len()))
            .collect()
    }

    fn is_ordinary(&self, v: usize) -> bool {
        !(self.pointed && v == 0)
    }

    pub fn is_semistable(&self) -> bool {
        self.degrees()
            .iter()
            .enumerate()
            .all(|(v, &(i, o))| !self.is_ordinary(v) || (i >= 1 && o >= 1 && i + o >= 3))
    }

    /// Every tree edge is contractible.
    pub fn is_contractible(&self) -> bool {
        let d = self.degrees();
        self.tree
            .edges()
            .iter()
            .all(|&(u, v)| (self.is_ordinary(u) && d[u].1 == 1) || (self.is_ordinary(v) && d[v].0 == 1))
    }

    /// Number of vertices that are not the distinguished one.
    pub fn ordinary_count(&self) -> usize {
        self.vertex_count() - usize::from(self.pointed)
    }
}

/// Unlabelled oriented trees on `n` vertices, with vertex 0 distinguished
/// when `pointed`.
fn oriented_tree_shapes(n: usize, pointed: bool) -> Arc<Vec<Digraph>> {
    type ShapeCache = Mutex<HashMap<(usize, bool), Arc<Vec<Digraph>>>>;
    static SHAPES: OnceLock<ShapeCache> = OnceLock::new();
    let cache = SHAPES.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("poisoned").get(&(n, pointed)) {
        return v.clone();
    }
    let shapes: Vec<Digraph> = if n <= 1 {
        vec![Digraph::empty(n)]
    } else {
        let prev = oriented_tree_shapes(n - 1, pointed);
        let mut seen: BTreeMap<CanonicalKey, Digraph> = BTreeMap::new();
        for t in prev.iter() {
            for v in 0..n - 1 {
                for dir in [true, false] {
                    let mut edges = t.edges().to_vec();
                    edges.push(if dir { (v, n - 1) } else { (n - 1, v) });
                    let d = Digraph::new(n, edges).expect("in range");
                    let (key, c) = if pointed {
                        let (k, p) = canonicalize(&PointedGraph::new(d).expect("nonempty"));
                        (k, p.graph().clone())
                    } else {
                        canonicalize(&d)
                    };
                    seen.entry(key).or_insert(c);
                }
            }
        }
        seen.into_values().collect()
    };
    let shapes = Arc::new(shapes);
    cache.lock().expect("poisoned").insert((n, pointed), shapes.clone());
    shapes
}

fn shape_vertex_automorphisms(t: &Digraph, pointed: bool) -> u64 {
    if pointed {
        canonical_form(&PointedGraph::new(t.clone()).expect("nonempty")).vertex_automorphisms
    } else {
        canonical_form(t).vertex_automorphisms
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, b| a * BigInt::from(b))
}

type Poly = Vec<Vec<BigRational>>;

fn poly_zero(k: usize, m: usize) -> Poly {
    vec![vec![BigRational::zero(); m + 1]; k + 1]
}

fn poly_mul(a: &Poly, b: &Poly, k: usize, m: usize) -> Poly {
    let mut r = poly_zero(k, m);
    for (i, ra) in a.iter().enumerate() {
        for (j, x) in ra.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (p, rb) in b.iter().enumerate().take(k + 1 - i) {
                for (q, y) in rb.iter().enumerate().take(m + 1 - j) {
                    if !y.is_zero() {
                        r[i + p][j + q] += x * y;
                    }
                }
            }
        }
    }
    r
}

/// Counts contractible semistable decorated trees with `k` outward and `m`
/// inward labelled legs, grouped by vertex count (`result[n]`, `n ≥ 1`).
///
/// Legs are distributed over each unlabelled oriented tree shape by dynamic
/// programming on the tree: the state of a vertex records whether its
/// outdegree and indegree equal one, which is all edge contractibility
/// depends on.
pub fn count_contractible_trees(k: usize, m: usize, pointed: bool, limits: &Limits) -> Result<Vec<BigInt>> {
    if !pointed && (k < 2 || m < 2) {
        return domain("plain decorated trees need k, m >= 2");
    }
    limits.check_legs(k + m)?;
    let max_n = max_tree_vertices(k, m, pointed);
    let mut counts = vec![BigInt::zero(); max_n + 1];
    for (n, c) in counts.iter_mut().enumerate().skip(1) {
        *c = count_on_shapes(k, m, n, pointed);
    }
    Ok(counts)
}

/// The single entry `t_{k,m}(n)` of [`count_contractible_trees`], without
/// enumerating the larger tree shapes.
pub fn count_contractible_trees_of_size(
    k: usize,
    m: usize,
    n: usize,
    pointed: bool,
    limits: &Limits,
) -> Result<BigInt> {
    if !pointed && (k < 2 || m < 2) {
        return domain("plain decorated trees need k, m >= 2");
    }
    limits.check_legs(k + m)?;
    if n == 0 || n > max_tree_vertices(k, m, pointed) {
        return Ok(BigInt::zero());
    }
    Ok(count_on_shapes(k, m, n, pointed))
}

fn count_on_shapes(k: usize, m: usize, n: usize, pointed: bool) -> BigInt {
    let mut total = BigRational::zero();
    for shape in oriented_tree_shapes(n, pointed).iter() {
        let s = count_on_shape(shape, pointed, k, m);
        let aut = shape_vertex_automorphisms(shape, pointed);
        total += s / BigRational::from_integer(BigInt::from(aut));
    }
    let c = total * BigRational::from_integer(factorial(k) * factorial(m));
    debug_assert!(c.is_integer());
    c.to_integer()
}

fn max_tree_vertices(k: usize, m: usize, pointed: bool) -> usize {
    if pointed {
        // each ordinary vertex of a contractible tree needs a free leg
        // besides its tree edges; bounded by the total number of legs
        (k + m) + 1
    } else {
        k + m - 2
    }
}

fn count_on_shape(t: &Digraph, pointed: bool, k: usize, m: usize) -> BigRational {
    let n = t.vertex_count();
    let deg = t.degree_table();
    // local[v][state] = Σ s^x t^y / (x! y!)
    let inv_fact: Vec<BigRational> = (0..=k.max(m))
        .map(|i| BigRational::from_integer(BigInt::one()) / BigRational::from_integer(factorial(i)))
        .collect();
    let mut local: Vec<[Poly; 4]> = Vec::with_capacity(n);
    for v in 0..n {
        let ordinary = !(pointed && v == 0);
        let (ti, to) = deg[v];
        let mut tab: [Poly; 4] = std::array::from_fn(|_| poly_zero(k, m));
        for x in 0..=k {
            for y in 0..=m {
                let (din, dout) = (ti + y, to + x);
                if ordinary && !(din >= 1 && dout >= 1 && din + dout >= 3) {
                    continue;
                }
                let a = ordinary && dout == 1;
                let b = ordinary && din == 1;
                let st = usize::from(a) * 2 + usize::from(b);
                tab[st][x][y] += &inv_fact[x] * &inv_fact[y];
            }
        }
        local.push(tab);
    }
    // root at 0, children discovered by BFS over the undirected tree
    let mut order = vec![0usize];
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for &(a, b) in t.edges() {
            let w = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                order.push(w);
            }
        }
        i += 1;
    }
    let mut table: Vec<[Poly; 4]> = local;
    for &c in order.iter().rev() {
        let p = parent[c];
        if p == usize::MAX {
            continue;
        }
        let down = t.edges().contains(&(p, c));
        let child = table[c].clone();
        let mut merged: [Poly; 4] = std::array::from_fn(|_| poly_zero(k, m));
        for ps in 0..4 {
            let (pa, pb) = (ps & 2 != 0, ps & 1 != 0);
            let mut acc = poly_zero(k, m);
            for (cs, cp) in child.iter().enumerate() {
                let (ca, cb) = (cs & 2 != 0, cs & 1 != 0);
                let ok = if down { pa || cb } else { ca || pb };
                if ok {
                    for (r, row) in cp.iter().enumerate() {
                        for (s, x) in row.iter().enumerate() {
                            acc[r][s] += x;
                        }
                    }
                }
            }
            merged[ps] = poly_mul(&table[p][ps], &acc, k, m);
        }
        table[p] = merged;
    }
    table[0].iter().fold(BigRational::zero(), |a, p| a + &p[k][m])
}

/// Isomorph-free list of contractible semistable decorated trees, grouped by
/// vertex count (`result[n]`).
pub fn contractible_trees(k: usize, m: usize, pointed: bool, limits: &Limits) -> Result<Vec<Vec<DecoratedTree>>> {
    if !pointed && (k < 2 || m < 2) {
        return domain("plain decorated trees need k, m >= 2");
    }
    limits.check_legs(k + m)?;
    let max_n = max_tree_vertices(k, m, pointed);
    let mut out = vec![Vec::new(); max_n + 1];
    for (n, bucket) in out.iter_mut().enumerate().skip(1) {
        for shape in oriented_tree_shapes(n, pointed).iter() {
            trees_on_shape(shape, pointed, k, m, bucket);
        }
    }
    Ok(out)
}

fn tree_automorphisms(t: &Digraph, pointed: bool) -> Vec<Vec<usize>> {
    let n = t.vertex_count();
    let adj = t.adjacency_matrix();
    let mut res = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    fn rec(
        k: usize,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        adj: &[Vec<u32>],
        pointed: bool,
        res: &mut Vec<Vec<usize>>,
    ) {
        let n = adj.len();
        if k == n {
            res.push(perm.clone());
            return;
        }
        for img in 0..n {
            if used[img] || (pointed && (k == 0) != (img == 0)) {
                continue;
            }
            // partial consistency with earlier vertices
            if (0..k).all(|j| adj[k][j] == adj[img][perm[j]] && adj[j][k] == adj[perm[j]][img])
                && adj[k][k] == adj[img][img]
            {
                used[img] = true;
                perm[k] = img;
                rec(k + 1, perm, used, adj, pointed, res);
                used[img] = false;
            }
        }
    }
    let mut used = vec![false; n];
    rec(0, &mut perm, &mut used, &adj, pointed, &mut res);
    res
}

fn trees_on_shape(t: &Digraph, pointed: bool, k: usize, m: usize, out: &mut Vec<DecoratedTree>) {
    let n = t.vertex_count();
    let auts = tree_automorphisms(t, pointed);
    let mut xs = vec![0usize; n];
    let mut ys = vec![0usize; n];
    distribute(0, k, &mut xs, &mut |xs| {
        distribute(0, m, &mut ys, &mut |ys| {
            let probe = DecoratedTree {
                tree: t.clone(),
                out_legs: xs.iter().map(|&x| vec![0; x]).collect(),
                in_legs: ys.iter().map(|&y| vec![0; y]).collect(),
                pointed,
            };
            if !probe.is_semistable() || !probe.is_contractible() {
                return;
            }
            for oa in assignments(k, xs) {
                for ia in assignments(m, ys) {
                    // keep only the least representative of the Aut(T)-orbit
                    let minimal = auts.iter().all(|p| {
                        let o2: Vec<usize> = oa.iter().map(|&v| p[v]).collect();
                        let i2: Vec<usize> = ia.iter().map(|&v| p[v]).collect();
                        (&oa, &ia) <= (&o2, &i2)
                    });
                    if !minimal {
                        continue;
                    }
                    let mut out_legs = vec![Vec::new(); n];
                    for (label, &v) in oa.iter().enumerate() {
                        out_legs[v].push(label);
                    }
                    let mut in_legs = vec![Vec::new(); n];
                    for (label, &v) in ia.iter().enumerate() {
                        in_legs[v].push(label);
                    }
                    out.push(DecoratedTree {
                        tree: t.clone(),
                        out_legs,
                        in_legs,
                        pointed,
                    });
                }
            }
        });
    });
}

fn distribute(i: usize, left: usize, xs: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if i + 1 == xs.len() {
        xs[i] = left;
        f(xs);
        return;
    }
    if xs.is_empty() {
        if left == 0 {
            f(xs);
        }
        return;
    }
    for x in 0..=left {
        xs[i] = x;
        distribute(i + 1, left - x, xs, f);
    }
}

/// All maps label -> vertex hitting vertex `v` exactly `sizes[v]` times.
fn assignments(total: usize, sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut res = Vec::new();
    let mut cur = vec![0usize; total];
    let mut rem = sizes.to_vec();
    fn rec(i: usize, cur: &mut Vec<usize>, rem: &mut Vec<usize>, res: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            res.push(cur.clone());
            return;
        }
        for v in 0..rem.len() {
            if rem[v] > 0 {
                rem[v] -= 1;
                cur[i] = v;
                rec(i + 1, cur, rem, res);
                rem[v] += 1;
            }
        }
    }
    rec(0, &mut cur, &mut rem, &mut res);
    res
}

/// Closed forms for `t_{k,m}(n)`: `n = 2`, `n = 3`, and `t_{k,2}(k) = (2k-3)!!`.
pub fn t_closed_forms(k: usize, m: usize, n: usize) -> Result<BigInt> {
    if k < 2 || m < 2 {
        return domain("closed forms need k, m >= 2");
    }
    let (ki, mi) = (BigInt::from(k), BigInt::from(m));
    let pow = |b: u32, e: usize| BigInt::from(b).pow(e as u32);
    match n {
        2 => Ok(pow(2, k) + pow(2, m) - &ki - &mi - 3),
        3 => {
            // twice the closed form, to stay in integers
            let two_t = (pow(3, k + 1) + pow(3, m + 1))
                - BigInt::from(2) * (pow(2, k) + pow(2, m)) * (&ki + &mi)
                - BigInt::from(10) * (pow(2, k) + pow(2, m))
                + BigInt::from(2) * pow(2, k + m)
                + (&ki * &ki + &mi * &mi)
                + BigInt::from(7) * (&ki + &mi)
                + BigInt::from(2) * &ki * &mi
                + 14;
            Ok(two_t / 2)
        }
        _ if m == 2 && n == k => {
            let mut acc = BigInt::one();
            let mut j = 2 * k as i64 - 3;
            while j > 1 {
                acc *= j;
                j -= 2;
            }
            Ok(acc)
        }
        _ => domain(format!("no closed form for t_{{{k},{m}}}({n})")),
    }
}

/// A row of the tree table: `(k, m)` and the counts for `n = 1..`.
pub type TreeTableRow = ((usize, usize), Vec<u64>);

/// Tree counts laid out one row per `(k, m)`, counts for `n = 1..`.
/// Rows `(k, m)` with `2 ≤ m ≤ k ≤ kmax`, `m ≤ mmax`, `k + m ≤ kmax + 2`,
/// ordered by total degree and then by decreasing `k`.
pub fn tree_table_rows(kmax: usize, mmax: usize, limits: &Limits) -> Result<Vec<TreeTableRow>> {
    let mut rows = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for k in 2..=kmax {
        for m in 2..=mmax.min(k) {
            if k + m <= kmax + 2 {
                pairs.push((k, m));
            }
        }
    }
    pairs.sort_by_key(|&(k, m)| (k + m, std::cmp::Reverse(k)));
    for (k, m) in pairs {
        let c = count_contractible_trees(k, m, false, limits)?;
        let vals: Vec<u64> = c[1..].iter().map(|x| x.to_u64().expect("fits in u64")).collect();
        rows.push(((k, m), vals));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonical_key;

    fn l2() -> Digraph {
        Digraph::new(1, vec![(0, 0), (0, 0)]).unwrap()
    }
    fn h3() -> Digraph {
        Digraph::new(2, vec![(1, 0), (1, 0), (0, 1)]).unwrap()
    }
    fn ns() -> Digraph {
        Digraph::new(2, vec![(0, 0), (1, 1), (0, 1)]).unwrap()
    }

    fn keys<G: GraphLike>(v: &[G]) -> Vec<CanonicalKey> {
        let mut k: Vec<_> = v.iter().map(canonical_key).collect();
        k.sort();
        k
    }

    #[test]
    fn weight_one_plain() {
        let all = semistable_graphs(1, EnumOptions::default()).unwrap();
        assert_eq!(all.len(), 3);
        assert_eq!(keys(&all), keys(&[l2(), h3(), ns()]));
        let st = semistable_graphs(1, EnumOptions::stable()).unwrap();
        assert_eq!(keys(&st), keys(&[l2()]));
    }

    #[test]
    fn weight_one_pointed_strong() {
        let p = semistable_pointed_graphs(1, EnumOptions::strong()).unwrap();
        assert_eq!(p, vec![PointedGraph::from_edges(1, vec![(0, 0)]).unwrap()]);
        assert_eq!(
            semistable_pointed_graphs(0, EnumOptions::default()).unwrap(),
            vec![PointedGraph::point()]
        );
    }

    /// Independent generation: every labelled graph with `|V| <= 2`, `|E| = |V| + 1`.
    #[test]
    fn weight_one_brute_force_agrees() {
        let mut found = std::collections::BTreeSet::new();
        for n in 1..=2usize {
            let e = n + 1;
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
            let mut idx = vec![0usize; e];
            loop {
                let edges: Vec<_> = idx.iter().map(|&i| pairs[i]).collect();
                let g = Digraph::new(n, edges).unwrap();
                if g.is_semistable() {
                    found.insert(canonical_key(&g));
                }
                let mut j = 0;
                while j < e {
                    idx[j] += 1;
                    if idx[j] < pairs.len() {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == e {
                    break;
                }
            }
        }
        let gen: std::collections::BTreeSet<_> = semistable_graphs(1, EnumOptions::default())
            .unwrap()
            .iter()
            .map(canonical_key)
            .collect();
        assert_eq!(found, gen);
    }

    #[test]
    fn capacity_guard() {
        assert!(matches!(
            semistable_graphs(5, EnumOptions::default()),
            Err(Error::Capacity { .. })
        ));
        assert!(count_contractible_trees(6, 6, false, &Limits::default()).is_err());
    }

    #[test]
    fn fibers_weight_one() {
        let f = stabilization_fibers::<Digraph>(1, EnumOptions::default(), &Limits::default()).unwrap();
        assert_eq!(f.len(), 1);
        let fib = f.values().next().unwrap();
        assert_eq!(fib.stable, l2());
        assert_eq!(keys(&fib.members), keys(&[l2(), h3()]));
        let fp = stabilization_fibers::<PointedGraph>(1, EnumOptions::default(), &Limits::default()).unwrap();
        let p1 = PointedGraph::from_edges(1, vec![(0, 0)]).unwrap();
        assert!(fp[&canonical_key(&p1)].members.contains(&p1));
    }

    #[test]
    fn small_tree_counts() {
        let l = Limits::default();
        let c = count_contractible_trees(2, 2, false, &l).unwrap();
        assert_eq!(c[1..], [BigInt::from(1), BigInt::from(1)]);
        let c = count_contractible_trees(4, 2, false, &l).unwrap();
        let v: Vec<i64> = c[1..].iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(v, vec![1, 11, 25, 15]);
    }

    #[test]
    fn explicit_trees_match_counts() {
        let l = Limits::default();
        for (k, m) in [(2, 2), (3, 2), (3, 3), (4, 2), (4, 3)] {
            let trees = contractible_trees(k, m, false, &l).unwrap();
            let counts = count_contractible_trees(k, m, false, &l).unwrap();
            for n in 1..counts.len() {
                assert_eq!(BigInt::from(trees[n].len()), counts[n], "({k},{m}) n={n}");
                for t in &trees[n] {
                    assert!(t.is_semistable() && t.is_contractible());
                }
            }
        }
        for (k, m) in [(0, 0), (1, 1), (2, 1), (2, 2)] {
            let trees = contractible_trees(k, m, true, &l).unwrap();
            let counts = count_contractible_trees(k, m, true, &l).unwrap();
            for n in 1..counts.len() {
                assert_eq!(BigInt::from(trees[n].len()), counts[n], "pointed ({k},{m}) n={n}");
            }
        }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(t_closed_forms(5, 2, 5).unwrap(), BigInt::from(105));
        assert_eq!(t_closed_forms(3, 3, 2).unwrap(), BigInt::from(7));
        assert_eq!(t_closed_forms(5, 3, 3).unwrap(), BigInt::from(208));
        assert!(t_closed_forms(5, 3, 4).is_err());
    }
}
