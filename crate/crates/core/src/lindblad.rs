//! The Lindblad generator `L[ρ] = −i[H, ρ] + γ Σ_b (M_b ρ M_b† − ½{M_b†M_b, ρ})`.
//!
//! [`LindbladGenerator`] applies `L` in O(N²) per call: `H` and
//! `K = γ Σ M†M = 2γ Σ v v†` are banded (plus corners), and each jump term
//! `M ρ M† = (v†ρv) u u†` costs a 2×2 contraction and a 4-entry update.
//!
//! [`SuperoperatorMatrix`] is the same map as an explicit sparse N²×N² matrix
//! under column stacking:
//!
//! ```text
//! L = −i(I⊗H − Hᵀ⊗I) + γ Σ_b [ conj(M_b)⊗M_b − ½ I⊗(M_b†M_b) − ½ (M_b†M_b)ᵀ⊗I ]
//! ```

use std::collections::BTreeMap;

use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::{Mat, MatMut, MatRef};

use crate::error::{Error, Result};
use crate::model::{
    build_hamiltonian, build_jump_operators, build_phase_profile, DissipationSpec,
    HamiltonianMatrix, JumpOperator, LatticeSpec,
};
use crate::state::DensityMatrix;
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Default memory budget for an assembled superoperator.
pub const DEFAULT_SUPEROPERATOR_BUDGET: usize = 4 << 30;

/// A sparse Hermitian matrix split into its real diagonal and off-diagonal
/// entries, applied from either side in O(N · nnz / N).
#[derive(Debug, Clone, PartialEq)]
pub struct BandedHermitian {
    pub diag: Vec<f64>,
    pub off: Vec<(usize, usize, C64)>,
}

impl BandedHermitian {
    fn from_map(n: usize, map: BTreeMap<(usize, usize), C64>) -> Self {
        let mut diag = vec![0.0; n];
        let mut off = Vec::new();
        for ((r, c), v) in map {
            if r == c {
                diag[r] = v.re;
            } else if v != ZERO {
                off.push((r, c, v));
            }
        }
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let n = self.dim();
        let mut m = Mat::<C64>::zeros(n, n);
        for (i, &d) in self.diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        for &(r, c, v) in &self.off {
            m[(r, c)] += v;
        }
        m
    }

    /// `out += scale · (A x)`.
    fn add_left(&self, x: MatRef<'_, C64>, scale: C64, mut out: MatMut<'_, C64>) {
        let n = self.dim();
        for j in 0..n {
            for (i, &d) in self.diag.iter().enumerate() {
                out[(i, j)] += scale * d * x[(i, j)];
            }
            for &(r, c, v) in &self.off {
                out[(r, j)] += scale * v * x[(c, j)];
            }
        }
    }

    /// `out += scale · (x A)`.
    fn add_right(&self, x: MatRef<'_, C64>, scale: C64, mut out: MatMut<'_, C64>) {
        let n = self.dim();
        for (j, &d) in self.diag.iter().enumerate() {
            let s = scale * d;
            for i in 0..n {
                out[(i, j)] += s * x[(i, j)];
            }
        }
        for &(c, j, v) in &self.off {
            let s = scale * v;
            for i in 0..n {
                out[(i, j)] += s * x[(i, c)];
            }
        }
    }
}

/// `H`, the jump set, `γ`, and the precomputed `K = γ Σ M†M`.
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    pub hamiltonian: HamiltonianMatrix,
    pub jumps: Vec<JumpOperator>,
    pub gamma: f64,
    h: BandedHermitian,
    k: BandedHermitian,
}

impl LindbladGenerator {
    /// Builds `H`, the phase profile and the channels from parameter specs.
    pub fn new(lattice: &LatticeSpec, dissipation: &DissipationSpec) -> Result<Self> {
        let h = build_hamiltonian(lattice)?;
        let profile = build_phase_profile(dissipation, lattice.n)?;
        let jumps = build_jump_operators(&profile, lattice.n, dissipation.boundary)?;
        Self::from_parts(h, jumps, dissipation.gamma)
    }

    pub fn from_parts(
        hamiltonian: HamiltonianMatrix,
        jumps: Vec<JumpOperator>,
        gamma: f64,
    ) -> Result<Self> {
        let n = hamiltonian.dim();
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma must be finite and >= 0 (got {gamma})")));
        }
        if let Some(op) = jumps.iter().find(|op| op.sites.0 >= n || op.sites.1 >= n) {
            return Err(Error::Structural(format!(
                "jump on bond {} touches sites {:?} outside a lattice of {n}",
                op.bond, op.sites
            )));
        }

        let mut hmap = BTreeMap::new();
        for &(r, c, v) in hamiltonian.entries() {
            *hmap.entry((r, c)).or_insert(ZERO) += C64::new(v, 0.0);
        }
        let h = BandedHermitian::from_map(n, hmap);

        let mut kmap = BTreeMap::new();
        for op in &jumps {
            for (a, va) in op.v_entries() {
                for (b, vb) in op.v_entries() {
                    *kmap.entry((a, b)).or_insert(ZERO) += va * vb.conj() * (2.0 * gamma);
                }
            }
        }
        let k = BandedHermitian::from_map(n, kmap);

        Ok(Self { hamiltonian, jumps, gamma, h, k })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// Cheap upper bound on the induced norm of `L` (row sums of `H`, `K`
    /// and the jump terms).
    pub fn norm_bound(&self) -> f64 {
        let row_sum = |a: &BandedHermitian| {
            let mut rows = a.diag.iter().map(|d| d.abs()).collect::<Vec<_>>();
            for &(r, _, v) in &a.off {
                rows[r] += v.norm();
            }
            rows.into_iter().fold(0.0, f64::max)
        };
        2.0 * row_sum(&self.h) + row_sum(&self.k) + 4.0 * self.gamma
    }

    /// `K = γ Σ M†M`.
    pub fn k(&self) -> &BandedHermitian {
        &self.k
    }

    fn check_dim(&self, m: MatRef<'_, C64>) -> Result<()> {
        let n = self.dim();
        if m.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.nrows() });
        }
        if m.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.ncols() });
        }
        Ok(())
    }

    /// `−i[H, x]` for an arbitrary square `x`.
    pub fn hamiltonian_part(&self, x: MatRef<'_, C64>) -> Result<Mat<C64>> {
        self.check_dim(x)?;
        let mut out = Mat::<C64>::zeros(self.dim(), self.dim());
        self.add_hamiltonian_part(x, out.as_mut());
        Ok(out)
    }

    /// `γ Σ (M x M† − ½{M†M, x})` for an arbitrary square `x`.
    pub fn dissipator(&self, x: MatRef<'_, C64>) -> Result<Mat<C64>> {
        self.check_dim(x)?;
        let mut out = Mat::<C64>::zeros(self.dim(), self.dim());
        self.add_dissipator(x, out.as_mut());
        Ok(out)
    }

    /// `L[x]` for an arbitrary square `x`.
    pub fn apply(&self, x: MatRef<'_, C64>) -> Result<Mat<C64>> {
        self.check_dim(x)?;
        let mut out = Mat::<C64>::zeros(self.dim(), self.dim());
        self.apply_into(x, out.as_mut());
        Ok(out)
    }

    /// Overwrites `out` with `L[x]`. Dimensions are not checked.
    pub fn apply_into(&self, x: MatRef<'_, C64>, mut out: MatMut<'_, C64>) {
        out.fill(ZERO);
        self.add_hamiltonian_part(x, out.as_mut());
        self.add_dissipator(x, out);
    }

    fn add_hamiltonian_part(&self, x: MatRef<'_, C64>, mut out: MatMut<'_, C64>) {
        let minus_i = C64::new(0.0, -1.0);
        self.h.add_left(x, minus_i, out.as_mut());
        self.h.add_right(x, -minus_i, out);
    }

    fn add_dissipator(&self, x: MatRef<'_, C64>, mut out: MatMut<'_, C64>) {
        let half = C64::new(-0.5, 0.0);
        self.k.add_left(x, half, out.as_mut());
        self.k.add_right(x, half, out.as_mut());
        if self.gamma == 0.0 {
            return;
        }
        for op in &self.jumps {
            let v = op.v_entries();
            let mut w = ZERO;
            for &(a, va) in &v {
                for &(b, vb) in &v {
                    w += va.conj() * x[(a, b)] * vb;
                }
            }
            if w == ZERO {
                continue;
            }
            let w = w * self.gamma;
            let u = op.u_entries();
            for &(a, ua) in &u {
                for &(b, ub) in &u {
                    out[(a, b)] += w * ua * ub.conj();
                }
            }
        }
    }

    /// Sparse N²×N² superoperator with the default memory budget.
    pub fn superoperator(&self) -> Result<SuperoperatorMatrix> {
        assemble_superoperator_with_budget(self, DEFAULT_SUPEROPERATOR_BUDGET)
    }
}

pub fn apply_hamiltonian_part(gen: &LindbladGenerator, rho: &DensityMatrix) -> Result<Mat<C64>> {
    gen.hamiltonian_part(rho.as_mat())
}

pub fn apply_dissipator(gen: &LindbladGenerator, rho: &DensityMatrix) -> Result<Mat<C64>> {
    gen.dissipator(rho.as_mat())
}

pub fn apply_generator(gen: &LindbladGenerator, rho: &DensityMatrix) -> Result<Mat<C64>> {
    gen.apply(rho.as_mat())
}

/// The generator as an explicit sparse matrix acting on `vec(ρ)`.
#[derive(Debug, Clone)]
pub struct SuperoperatorMatrix {
    n: usize,
    mat: SparseColMat<usize, C64>,
}

/// Stored nonzeros per N² allowed by the memory estimate.
const NNZ_PER_N2: usize = 40;

pub fn assemble_superoperator(gen: &LindbladGenerator) -> Result<SuperoperatorMatrix> {
    gen.superoperator()
}

pub fn assemble_superoperator_with_budget(
    gen: &LindbladGenerator,
    budget_bytes: usize,
) -> Result<SuperoperatorMatrix> {
    let n = gen.dim();
    let dim = n
        .checked_mul(n)
        .ok_or_else(|| Error::ResourceLimit(format!("N² overflows for N = {n}")))?;
    // values + row indices, plus column pointers
    let per_entry = std::mem::size_of::<C64>() + std::mem::size_of::<usize>();
    let estimate = dim
        .saturating_mul(NNZ_PER_N2)
        .saturating_mul(per_entry)
        .saturating_add(dim.saturating_mul(std::mem::size_of::<usize>()));
    if estimate > budget_bytes {
        return Err(Error::ResourceLimit(format!(
            "superoperator for N = {n} needs up to {estimate} bytes, budget is {budget_bytes}"
        )));
    }

    let idx = |i: usize, j: usize| i + n * j;
    let mut trip: Vec<(usize, usize, C64)> = Vec::with_capacity(12 * dim + 16 * gen.jumps.len());
    let minus_i = C64::new(0.0, -1.0);
    let half = C64::new(-0.5, 0.0);

    // I ⊗ A: A acts on the row index within each column block.
    // Aᵀ ⊗ I: (ρA)_{i,q} = Σ_p ρ_{i,p} A_{p,q}.
    for (parts, scale, right) in [(&gen.h, minus_i, -minus_i), (&gen.k, half, half)] {
        for col in 0..n {
            for (i, &d) in parts.diag.iter().enumerate() {
                if d != 0.0 {
                    trip.push((idx(i, col), idx(i, col), scale * d));
                }
            }
            for &(r, c, v) in &parts.off {
                trip.push((idx(r, col), idx(c, col), scale * v));
            }
        }
        for row in 0..n {
            for (p, &d) in parts.diag.iter().enumerate() {
                if d != 0.0 {
                    trip.push((idx(row, p), idx(row, p), right * d));
                }
            }
            for &(p, q, v) in &parts.off {
                trip.push((idx(row, q), idx(row, p), right * v));
            }
        }
    }

    // γ conj(M) ⊗ M: (MρM†)_{a,p} = Σ_{b,q} M_{a,b} ρ_{b,q} conj(M_{p,q}).
    for op in &gen.jumps {
        let u = op.u_entries();
        let v = op.v_entries();
        for &(a, ua) in &u {
            for &(b, vb) in &v {
                let m_ab = ua * vb.conj();
                for &(p, up) in &u {
                    for &(q, vq) in &v {
                        let m_pq = up * vq.conj();
                        trip.push((idx(a, p), idx(b, q), m_ab * m_pq.conj() * gen.gamma));
                    }
                }
            }
        }
    }

    let mat = csc_from_triplets(dim, trip)?;
    Ok(SuperoperatorMatrix { n, mat })
}

fn csc_from_triplets(dim: usize, mut trip: Vec<(usize, usize, C64)>) -> Result<SparseColMat<usize, C64>> {
    trip.sort_unstable_by_key(|&(r, c, _)| (c, r));
    let mut col_ptr = vec![0usize; dim + 1];
    let mut row_idx = Vec::with_capacity(trip.len());
    let mut vals: Vec<C64> = Vec::with_capacity(trip.len());
    let mut last: Option<(usize, usize)> = None;
    for (r, c, v) in trip {
        if last == Some((r, c)) {
            *vals.last_mut().unwrap() += v;
        } else {
            row_idx.push(r);
            vals.push(v);
            col_ptr[c + 1] += 1;
            last = Some((r, c));
        }
    }
    for c in 0..dim {
        col_ptr[c + 1] += col_ptr[c];
    }
    let symbolic = SymbolicSparseColMat::new_checked(dim, dim, col_ptr, None, row_idx);
    Ok(SparseColMat::new(symbolic, vals))
}

impl SuperoperatorMatrix {
    /// Lattice size N (the matrix is N²×N²).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    pub fn nnz(&self) -> usize {
        self.mat.compute_nnz()
    }

    pub fn as_sparse(&self) -> &SparseColMat<usize, C64> {
        &self.mat
    }

    /// `L · x`.
    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        let mut y = vec![ZERO; self.dim()];
        self.for_each(|r, c, v| y[r] += v * x[c]);
        Ok(y)
    }

    /// Visits every stored entry as `(row, col, value)`.
    pub fn for_each(&self, mut f: impl FnMut(usize, usize, C64)) {
        let m = self.mat.as_ref();
        let sym = m.symbolic();
        let col_ptr = sym.col_ptr();
        let row_idx = sym.row_idx();
        let vals = m.val();
        for c in 0..self.dim() {
            for k in col_ptr[c]..col_ptr[c + 1] {
                f(row_idx[k], c, vals[k]);
            }
        }
    }

    /// Dense copy; only sensible for small N.
    pub fn to_dense(&self) -> Mat<C64> {
        let mut d = Mat::<C64>::zeros(self.dim(), self.dim());
        self.for_each(|r, c, v| d[(r, c)] += v);
        d
    }

    /// `max_c |Σ_i L[i(N+1), c]|`, the deviation of `vec(I)† L` from zero.
    pub fn trace_row_defect(&self) -> f64 {
        let n = self.n;
        let mut acc = vec![ZERO; self.dim()];
        self.for_each(|r, c, v| {
            if r % (n + 1) == 0 {
                acc[c] += v;
            }
        });
        acc.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// The diagonal entries `L[i, i]`.
    pub fn diagonal(&self) -> Vec<C64> {
        let mut d = vec![ZERO; self.dim()];
        self.for_each(|r, c, v| {
            if r == c {
                d[r] += v;
            }
        });
        d
    }
}
