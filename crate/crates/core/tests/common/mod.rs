//! Independent reference implementations shared by the integration tests
//! and the acceptance suite. Nothing here calls into the library's own
//! numerics.

#![allow(dead_code)]

use approxsym::{Graph, Permutation};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Permutation {
    let mut forward: Vec<usize> = (0..n).collect();
    forward.shuffle(rng);
    Permutation::from_forward(forward).unwrap()
}

pub fn adjacency(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    DMatrix::from_fn(n, n, |i, j| if g.has_edge(i, j) { 1.0 } else { 0.0 })
}

/// Permutation matrix with `P[π(i)][i] = 1`, so `(P A Pᵀ)[π(i)][π(j)] = A[i][j]`.
pub fn permutation_matrix(p: &Permutation) -> DMatrix<f64> {
    let n = p.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(p.image(i), i)] = 1.0;
    }
    m
}

/// `¼ ‖A − P A Pᵀ‖₁` with nalgebra matrix products.
pub fn energy_matrix_oracle(g: &Graph, p: &Permutation) -> u64 {
    let a = adjacency(g);
    let pm = permutation_matrix(p);
    let diff = &a - &pm * &a * pm.transpose();
    let l1: f64 = diff.iter().map(|x| x.abs()).sum();
    assert_eq!(l1 % 4.0, 0.0);
    (l1 / 4.0) as u64
}

/// Betweenness by listing every shortest path between every unordered pair.
pub fn betweenness_by_paths(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let mut out = vec![0.0; n];
    for s in 0..n {
        let dist = bfs(g, s);
        for t in s + 1..n {
            if dist[t] == usize::MAX {
                continue;
            }
            let mut paths = Vec::new();
            let mut stack = vec![s];
            collect_paths(g, &dist, t, &mut stack, &mut paths);
            let total = paths.len() as f64;
            for path in &paths {
                for &v in &path[1..path.len() - 1] {
                    out[v] += 1.0 / total;
                }
            }
        }
    }
    out
}

fn collect_paths(g: &Graph, dist: &[usize], t: usize, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let v = *stack.last().unwrap();
    if v == t {
        out.push(stack.clone());
        return;
    }
    for &w in g.neighbors(v) {
        if dist[w] == dist[v] + 1 && dist[w] <= dist[t] {
            stack.push(w);
            collect_paths(g, dist, t, stack, out);
            stack.pop();
        }
    }
}

pub fn bfs(g: &Graph, s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[s] = 0;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Dominant eigenpair of the adjacency matrix from a dense symmetric
/// eigendecomposition, eigenvector unit-norm and non-negative.
pub fn dominant_eigenpair(g: &Graph) -> (f64, Vec<f64>) {
    let eig = SymmetricEigen::new(adjacency(g));
    let (idx, &lambda) = eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let mut v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    (lambda, v)
}

/// `‖A x − λ x‖∞` with `λ` the Rayleigh quotient of `x`.
pub fn eigen_residual(g: &Graph, x: &[f64]) -> f64 {
    let a = adjacency(g);
    let x = nalgebra::DVector::from_column_slice(x);
    let ax = &a * &x;
    let lambda = x.dot(&ax) / x.dot(&x);
    (ax - x * lambda).amax()
}

/// Two-sided Student-t p-value by composite Simpson integration of the
/// density from 0 to |t|. The normalizing constant
/// `Γ((ν+1)/2) / (√(νπ) Γ(ν/2))` comes from the recurrence
/// `r(ν+2) = r(ν)·(ν+1)/ν` on `r(ν) = Γ((ν+1)/2) / Γ(ν/2)`.
pub fn student_t_two_sided_oracle(t: f64, dof: u32) -> f64 {
    let mut r = if dof % 2 == 1 { 1.0 / std::f64::consts::PI.sqrt() } else { std::f64::consts::PI.sqrt() / 2.0 };
    let mut nu = if dof % 2 == 1 { 1 } else { 2 };
    while nu < dof {
        r *= (nu as f64 + 1.0) / nu as f64;
        nu += 2;
    }
    let nuf = dof as f64;
    let c = r / (nuf * std::f64::consts::PI).sqrt();
    let density = |x: f64| c * (1.0 + x * x / nuf).powf(-(nuf + 1.0) / 2.0);

    let t = t.abs();
    let steps = 2 * ((t * 1000.0).ceil() as usize).max(1);
    let h = t / steps as f64;
    let mut area = density(0.0) + density(t);
    for i in 1..steps {
        area += if i % 2 == 1 { 4.0 } else { 2.0 } * density(i as f64 * h);
    }
    area *= h / 3.0;
    (1.0 - 2.0 * area).clamp(0.0, 1.0)
}

/// Graphs whose automorphism group is vertex-transitive.
pub fn vertex_transitive() -> Vec<(&'static str, Graph)> {
    let mut out = vec![
        ("C7", Graph::cycle(7).unwrap()),
        ("C12", Graph::cycle(12).unwrap()),
        ("K6", Graph::complete(6)),
        ("Q3", hypercube(3)),
        ("Q4", hypercube(4)),
        ("Petersen", petersen()),
        ("K3,3", complete_bipartite(3, 3)),
    ];
    out.push(("C4xC5", torus(4, 5)));
    out
}

pub fn hypercube(d: u32) -> Graph {
    let n = 1usize << d;
    let edges = (0..n).flat_map(|v| (0..d).map(move |b| (v, v ^ (1 << b)))).filter(|(u, v)| u < v);
    Graph::from_edges(n, edges).unwrap()
}

pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::from_edges(10, edges).unwrap()
}

pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    Graph::from_edges(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v)))).unwrap()
}

pub fn torus(w: usize, h: usize) -> Graph {
    let id = |x: usize, y: usize| y * w + x;
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            edges.push((id(x, y), id((x + 1) % w, y)));
            edges.push((id(x, y), id(x, (y + 1) % h)));
        }
    }
    Graph::from_edges(w * h, edges).unwrap()
}

/// An asymmetric graph on six vertices, the minimum order for one: a
/// triangle 1-2-5 with a tail 0 on vertex 1 and a path 2-3-4.
pub fn asymmetric_six() -> Graph {
    Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (2, 5)]).unwrap()
}

/// A smallest asymmetric tree: branches of length 1, 2 and 3 at vertex 2.
pub fn asymmetric_tree() -> Graph {
    Graph::from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (2, 6)]).unwrap()
}

/// Number of automorphisms by checking every permutation edge by edge.
pub fn automorphism_count(g: &Graph) -> usize {
    let n = g.n();
    let mut count = 0;
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        if g.edges().iter().all(|&(u, v)| g.has_edge(p[u], p[v])) {
            count += 1;
        }
    });
    count
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}
