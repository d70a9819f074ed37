//! Eigenvalue clustering on a reordered complex Schur form, and evaluation
//! of functions given by their Taylor jets at the cluster values.
//!
//! A polynomial `f` acts on a matrix `m` only through its jets
//! `f^{(j)}(c_k) / j!` (for `j` below the Jordan exponent of each cluster
//! value `c_k`). [`ClusteredSchur::eval_jets`] evaluates `f(m)` from those
//! jets with the block Schur-Parlett recurrence, which stays accurate when
//! the spectrum spreads over several orders of magnitude and a monomial or
//! Newton-form Horner scheme would lose every digit.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Schur};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::poly::Poly;
use crate::scalar::{real, Scalar, TolerancePolicy, ZERO};

/// One cluster of numerically coincident eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenCluster {
    pub value: Scalar,
    pub multiplicity: usize,
    /// Size of the largest Jordan block at this eigenvalue.
    pub block: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenClusterReport {
    pub clusters: Vec<EigenCluster>,
    /// Smallest `e` such that `s^e` annihilates the matrix, with `s` the
    /// squarefree product over cluster values.
    pub max_block: usize,
}

impl EigenClusterReport {
    pub fn dim(&self) -> usize {
        self.clusters.iter().map(|c| c.multiplicity).sum()
    }

    pub fn values(&self) -> Vec<Scalar> {
        self.clusters.iter().map(|c| c.value).collect()
    }

    /// `prod (t - a_k)` over the distinct cluster values.
    pub fn squarefree_part(&self) -> Poly {
        Poly::from_roots(&self.values())
    }

    /// `prod (t - a_k)^{block_k}`.
    pub fn minimal_polynomial(&self) -> Poly {
        self.clusters
            .iter()
            .fold(Poly::one(), |acc, c| &acc * &Poly::from_roots(&vec![c.value; c.block]))
    }
}

/// Schur form `m = Q T Q*` reordered so that each eigenvalue cluster
/// occupies one contiguous diagonal block of `T`, in report order.
#[derive(Debug, Clone)]
pub struct ClusteredSchur {
    q: DMatrix<Scalar>,
    t: DMatrix<Scalar>,
    /// Offset and size of each cluster's diagonal block.
    blocks: Vec<(usize, usize)>,
    report: EigenClusterReport,
}

impl ClusteredSchur {
    pub fn report(&self) -> &EigenClusterReport {
        &self.report
    }

    pub fn into_report(self) -> EigenClusterReport {
        self.report
    }

    /// `f(m)` for the function whose Taylor coefficients at the value of
    /// cluster `k` are `jets[k]` (missing higher coefficients are zero).
    pub fn eval_jets(&self, jets: &[Vec<Scalar>]) -> Result<Matrix> {
        if jets.len() != self.blocks.len() {
            return Err(Error::DimensionMismatch {
                expected: self.blocks.len(),
                found: jets.len(),
            });
        }
        let n = self.t.nrows();
        let mut f = DMatrix::zeros(n, n);
        for (k, &(start, size)) in self.blocks.iter().enumerate() {
            let c = self.report.clusters[k].value;
            let tkk = self.t.view((start, start), (size, size));
            let shifted = tkk - DMatrix::identity(size, size) * c;
            let mut power = DMatrix::identity(size, size);
            let mut block = DMatrix::zeros(size, size);
            for (j, &coef) in jets[k].iter().enumerate() {
                if j > 0 {
                    power = &power * &shifted;
                }
                block += &power * coef;
            }
            f.view_mut((start, start), (size, size)).copy_from(&block);
        }
        // Off-diagonal blocks, one superdiagonal at a time:
        // T_ii F_ij - F_ij T_jj = F_ii T_ij - T_ij F_jj + sum_k (F_ik T_kj - T_ik F_kj).
        let count = self.blocks.len();
        for gap in 1..count {
            for i in 0..count - gap {
                let j = i + gap;
                let (si, ni) = self.blocks[i];
                let (sj, nj) = self.blocks[j];
                let t_ij = self.t.view((si, sj), (ni, nj));
                let mut rhs = f.view((si, si), (ni, ni)) * t_ij - t_ij * f.view((sj, sj), (nj, nj));
                for k in i + 1..j {
                    let (sk, nk) = self.blocks[k];
                    rhs += f.view((si, sk), (ni, nk)) * self.t.view((sk, sj), (nk, nj))
                        - self.t.view((si, sk), (ni, nk)) * f.view((sk, sj), (nk, nj));
                }
                let x = triangular_sylvester(
                    &self.t.view((si, si), (ni, ni)).into_owned(),
                    &self.t.view((sj, sj), (nj, nj)).into_owned(),
                    &rhs,
                )?;
                f.view_mut((si, sj), (ni, nj)).copy_from(&x);
            }
        }
        Matrix::new(&self.q * f * self.q.adjoint())
    }
}

/// Solves `A X - X B = C` for upper-triangular `A` and `B` with disjoint
/// spectra by substitution.
fn triangular_sylvester(a: &DMatrix<Scalar>, b: &DMatrix<Scalar>, c: &DMatrix<Scalar>) -> Result<DMatrix<Scalar>> {
    let (p, q) = c.shape();
    let mut x = DMatrix::zeros(p, q);
    for j in 0..q {
        for i in (0..p).rev() {
            let mut acc = c[(i, j)];
            for k in i + 1..p {
                acc -= a[(i, k)] * x[(k, j)];
            }
            for k in 0..j {
                acc += x[(i, k)] * b[(k, j)];
            }
            let denom = a[(i, i)] - b[(j, j)];
            if denom == ZERO {
                return Err(Error::NumericalBreakdown(
                    "clusters share an eigenvalue in the Sylvester step".into(),
                ));
            }
            x[(i, j)] = acc / denom;
        }
    }
    Ok(x)
}

/// Clusters the eigenvalues of `m` and reorders its Schur form by cluster.
///
/// Eigenvalues are first grouped by single linkage at the generous radius
/// `‖m‖ tau_eq^{1/n}`. A group of `k` eigenvalues with mean `c` is accepted
/// when its diagonal block `D = T_kk - cI` in the reordered Schur form is
/// nilpotent to tolerance: the Jordan exponent is the smallest `e <= k`
/// with `‖D^e‖ <= tau_rank L^e`, where `L = max(|c|, ‖D‖, sqrt(tau_eq) ‖m‖)`.
/// Rejected groups are split along their longest spanning-tree edge.
pub fn clustered_schur(m: &Matrix, policy: &TolerancePolicy) -> Result<ClusteredSchur> {
    let n = m.dim();
    let scale = m.norm();
    if scale == 0.0 {
        return Ok(ClusteredSchur {
            q: DMatrix::identity(n, n),
            t: DMatrix::zeros(n, n),
            blocks: vec![(0, n)],
            report: EigenClusterReport {
                clusters: vec![EigenCluster {
                    value: ZERO,
                    multiplicity: n,
                    block: 1,
                }],
                max_block: 1,
            },
        });
    }
    let (q, mut t) = schur_form(m.inner())?;
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = ZERO;
        }
    }
    let eig: Vec<Scalar> = (0..n).map(|i| t[(i, i)]).collect();
    let mut form = Reorder {
        q,
        t,
        slots: (0..n).collect(),
    };

    let tree = spanning_tree(&eig);
    let radius = scale * policy.tau_eq.powf(1.0 / n as f64);
    let short: Vec<Edge> = tree.into_iter().filter(|e| e.2 <= radius).collect();
    let mut pending: Vec<(Vec<usize>, Vec<Edge>)> = components_of(&(0..n).collect::<Vec<_>>(), &short)
        .into_iter()
        .map(|members| {
            let edges = edges_within(&short, &members);
            (members, edges)
        })
        .collect();

    let floor = policy.tau_eq.sqrt() * scale;
    let mut accepted: Vec<(Vec<usize>, EigenCluster)> = Vec::new();
    while let Some((members, mut edges)) = pending.pop() {
        let k = members.len();
        let center = members.iter().map(|&i| eig[i]).sum::<Scalar>() / real(k as f64);
        if k == 1 {
            accepted.push((
                members,
                EigenCluster {
                    value: center,
                    multiplicity: 1,
                    block: 1,
                },
            ));
            continue;
        }
        let mut order = members.clone();
        order.extend(form.slots.iter().copied().filter(|i| !members.contains(i)));
        form.arrange(&order);
        if let Some(block) = jordan_exponent(&form.t, k, center, floor, policy) {
            accepted.push((
                members,
                EigenCluster {
                    value: center,
                    multiplicity: k,
                    block,
                },
            ));
            continue;
        }
        let longest = edges
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .2.total_cmp(&b.1 .2))
            .map(|(i, _)| i)
            .expect("a group of two or more eigenvalues has a spanning edge");
        edges.swap_remove(longest);
        for part in components_of(&members, &edges) {
            let part_edges = edges_within(&edges, &part);
            pending.push((part, part_edges));
        }
    }

    accepted.sort_by(|(_, a), (_, b)| {
        b.value
            .norm()
            .total_cmp(&a.value.norm())
            .then(a.value.re.total_cmp(&b.value.re))
            .then(a.value.im.total_cmp(&b.value.im))
    });
    let order: Vec<usize> = accepted.iter().flat_map(|(m, _)| m.iter().copied()).collect();
    form.arrange(&order);
    let mut blocks = Vec::with_capacity(accepted.len());
    let mut offset = 0;
    for (members, _) in &accepted {
        blocks.push((offset, members.len()));
        offset += members.len();
    }
    let clusters: Vec<EigenCluster> = accepted.into_iter().map(|(_, c)| c).collect();
    let max_block = clusters.iter().map(|c| c.block).max().unwrap_or(1);
    Ok(ClusteredSchur {
        q: form.q,
        t: form.t,
        blocks,
        report: EigenClusterReport { clusters, max_block },
    })
}

/// Complex Schur form `m = Q T Q*`.
///
/// The QR iteration can stall on nearly scalar matrices when deflation is
/// demanded at exactly machine precision, so the threshold is relaxed
/// fourfold per failed attempt. A result is accepted only when its
/// backward error is below `1e-12 ‖m‖`.
pub fn schur_form(m: &DMatrix<Scalar>) -> Result<(DMatrix<Scalar>, DMatrix<Scalar>)> {
    let max_iter = 200 * m.nrows().max(10);
    let mut eps = f64::EPSILON;
    while eps < 1e-12 {
        if let Some(schur) = Schur::try_new(m.clone(), eps, max_iter) {
            let (q, t) = schur.unpack();
            // Accept only a factorization that reproduces `m`.
            if (&q * &t * q.adjoint() - m).norm() <= 1e-12 * m.norm().max(f64::MIN_POSITIVE) {
                return Ok((q, t));
            }
        }
        eps *= 4.0;
    }
    Err(Error::NumericalBreakdown("Schur iteration did not converge".into()))
}

/// Clusters the eigenvalues of `m` and determines the Jordan exponent of
/// each cluster (see [`clustered_schur`]).
pub fn eigen_clusters(m: &Matrix, policy: &TolerancePolicy) -> Result<EigenClusterReport> {
    Ok(clustered_schur(m, policy)?.into_report())
}

/// Minimal polynomial of `m` assembled from its eigenvalue clusters.
pub fn minimal_polynomial(m: &Matrix, policy: &TolerancePolicy) -> Result<Poly> {
    Ok(eigen_clusters(m, policy)?.minimal_polynomial())
}

/// Evaluates `prod (m - c_k I)^{block_k}` in factored form.
pub fn eval_cluster_product(m: &Matrix, report: &EigenClusterReport) -> Matrix {
    report.clusters.iter().fold(Matrix::identity(m.dim()), |acc, c| {
        let shifted = m.shift(-c.value);
        (0..c.block).fold(acc, |acc, _| &acc * &shifted)
    })
}

/// Smallest `e <= k` for which the leading `k x k` block minus `c` is
/// nilpotent of index `e` to tolerance.
fn jordan_exponent(
    t: &DMatrix<Scalar>,
    k: usize,
    center: Scalar,
    floor: f64,
    policy: &TolerancePolicy,
) -> Option<usize> {
    let d = t.view((0, 0), (k, k)) - DMatrix::identity(k, k) * center;
    let local = center.norm().max(d.norm()).max(floor);
    let spread = (0..k).map(|i| d[(i, i)].norm()).fold(0.0, f64::max);
    let mut power = DMatrix::identity(k, k);
    for e in 1..=k {
        power = &power * &d;
        if power.norm() <= policy.tau_rank * local.powi(e as i32) {
            // A strongly non-normal block can pass the power test with
            // eigenvalues far apart; away from zero they must also sit
            // within the perturbation radius of a single eigenvalue.
            let away = center.norm() > floor;
            if away && spread > policy.tau_eq.powf(1.0 / e as f64) * center.norm() {
                return None;
            }
            return Some(e);
        }
    }
    None
}

/// A Schur form together with the eigenvalue index sitting in each
/// diagonal slot.
struct Reorder {
    q: DMatrix<Scalar>,
    t: DMatrix<Scalar>,
    slots: Vec<usize>,
}

impl Reorder {
    /// Permutes the diagonal into `order` (a list of eigenvalue indices) by
    /// adjacent unitary swaps.
    fn arrange(&mut self, order: &[usize]) {
        let rank: BTreeMap<usize, usize> = order.iter().enumerate().map(|(r, &i)| (i, r)).collect();
        let n = self.slots.len();
        loop {
            let mut swapped = false;
            for k in 0..n - 1 {
                if rank[&self.slots[k]] > rank[&self.slots[k + 1]] {
                    self.swap(k);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
    }

    /// Exchanges the diagonal entries at `k` and `k + 1`.
    fn swap(&mut self, k: usize) {
        let n = self.t.nrows();
        let t11 = self.t[(k, k)];
        let t22 = self.t[(k + 1, k + 1)];
        let t12 = self.t[(k, k + 1)];
        // Eigenvector of the 2x2 block for t22.
        let (v1, v2) = (t12, t22 - t11);
        let norm = (v1.norm_sqr() + v2.norm_sqr()).sqrt();
        self.slots.swap(k, k + 1);
        if norm == 0.0 {
            return;
        }
        let (c1, c2) = (v1 / norm, v2 / norm);
        // G = [[c1, -conj(c2)], [c2, conj(c1)]] is unitary with first column v.
        let g = [[c1, -c2.conj()], [c2, c1.conj()]];
        for j in 0..n {
            let a = self.t[(k, j)];
            let b = self.t[(k + 1, j)];
            self.t[(k, j)] = g[0][0].conj() * a + g[1][0].conj() * b;
            self.t[(k + 1, j)] = g[0][1].conj() * a + g[1][1].conj() * b;
        }
        for i in 0..n {
            let a = self.t[(i, k)];
            let b = self.t[(i, k + 1)];
            self.t[(i, k)] = a * g[0][0] + b * g[1][0];
            self.t[(i, k + 1)] = a * g[0][1] + b * g[1][1];
            let a = self.q[(i, k)];
            let b = self.q[(i, k + 1)];
            self.q[(i, k)] = a * g[0][0] + b * g[1][0];
            self.q[(i, k + 1)] = a * g[0][1] + b * g[1][1];
        }
        self.t[(k + 1, k)] = ZERO;
        self.t[(k, k)] = t22;
        self.t[(k + 1, k + 1)] = t11;
    }
}

pub(crate) type Edge = (usize, usize, f64);

/// Minimum spanning tree of the complete graph on the points (Prim).
pub(crate) fn spanning_tree(points: &[Scalar]) -> Vec<Edge> {
    let n = points.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![(f64::INFINITY, 0usize); n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    if n == 0 {
        return edges;
    }
    in_tree[0] = true;
    for j in 1..n {
        best[j] = ((points[j] - points[0]).norm(), 0);
    }
    for _ in 1..n {
        let (next, _) = (0..n)
            .filter(|&j| !in_tree[j])
            .map(|j| (j, best[j].0))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("vertices remain");
        in_tree[next] = true;
        edges.push((best[next].1, next, best[next].0));
        for j in 0..n {
            if !in_tree[j] {
                let d = (points[j] - points[next]).norm();
                if d < best[j].0 {
                    best[j] = (d, next);
                }
            }
        }
    }
    edges
}

pub(crate) fn edges_within(edges: &[Edge], members: &[usize]) -> Vec<Edge> {
    edges.iter().copied().filter(|e| members.contains(&e.0)).collect()
}

pub(crate) fn components_of(vertices: &[usize], edges: &[Edge]) -> Vec<Vec<usize>> {
    let mut label: BTreeMap<usize, usize> = vertices.iter().map(|&v| (v, v)).collect();
    fn find(label: &mut BTreeMap<usize, usize>, v: usize) -> usize {
        let parent = label[&v];
        if parent == v {
            v
        } else {
            let root = find(label, parent);
            label.insert(v, root);
            root
        }
    }
    for &(a, b, _) in edges {
        let ra = find(&mut label, a);
        let rb = find(&mut label, b);
        if ra != rb {
            label.insert(ra.max(rb), ra.min(rb));
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &v in vertices {
        let r = find(&mut label, v);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().collect()
}
