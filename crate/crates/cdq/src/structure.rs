//! Structure analysis of a quasiantichain lattice: the characteristic
//! matrices of its atoms, the matrix algebra they generate (a finite field),
//! the Frobenius exponent relating the algebra to the pairing, the cyclic
//! (block-companion) basis of a primitive element, and the final (a, b) law.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::cdcore::{classify, CdResult, PosetClass, Shape};
use crate::error::{Error, Result};
use crate::ffalg::{companion_matrix, matrix_order, Fp, FpMatrix, FpPoly, MatrixOrder, RowReducer};
use crate::formspace::{AlternatingForm, Subspace};

/// Cap on explicit element enumeration inside algebra checks.
const MAX_ALGEBRA_ELEMENTS: u128 = 1 << 16;

/// A matrix algebra over F_p that has passed the division-algebra checks:
/// closed under multiplication, every nonzero element invertible. For the
/// inputs this crate accepts it is a finite field of order p^dim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldAlgebra {
    field: Fp,
    n: usize,
    basis: Vec<FpMatrix>,
}

impl FieldAlgebra {
    pub fn field(&self) -> Fp {
        self.field
    }

    /// Side length of the matrices.
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// Dimension over F_p.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[FpMatrix] {
        &self.basis
    }

    /// Number of elements, p^dim.
    pub fn order(&self) -> u128 {
        (self.field.modulus() as u128)
            .checked_pow(self.dim() as u32)
            .unwrap_or(u128::MAX)
    }

    /// Element number `idx` in canonical scan order: base-p digits of idx
    /// are the coefficients over the basis, first coordinate fastest.
    pub fn element(&self, idx: u128) -> FpMatrix {
        let p = self.field.modulus() as u128;
        let mut acc = FpMatrix::zeros(self.field, self.n, self.n);
        let mut rest = idx;
        for b in &self.basis {
            let c = (rest % p) as u32;
            rest /= p;
            if c != 0 {
                acc = acc.add(&b.scale(c));
            }
        }
        acc
    }

    /// All p^dim elements in canonical scan order.
    pub fn elements(&self) -> Vec<FpMatrix> {
        (0..self.order()).map(|i| self.element(i)).collect()
    }

    pub fn contains(&self, m: &FpMatrix) -> bool {
        let mut red = RowReducer::new(self.field, self.n * self.n);
        for b in &self.basis {
            red.add_row(b.entries().to_vec());
        }
        red.contains(m.entries())
    }
}

/// The pairing matrices `Z_s[i][j]` = s-th W-coordinate of b(x_i, y_j) for
/// two bases given as row matrices (each n x d).
pub fn pairing_slices(f: &AlternatingForm, x_basis: &FpMatrix, y_basis: &FpMatrix) -> Vec<FpMatrix> {
    f.slices()
        .iter()
        .map(|s| x_basis.mul(&s.mul(&y_basis.transpose())))
        .collect()
}

/// Solves the joint linear system {(C, C') : C^T Z_s = Z_s C' for all s}
/// and returns the projection to C, verified to be a division algebra.
///
/// Requires the pairing to have zero radical on both sides; that makes the
/// projection injective, so the solution space and the algebra coincide.
pub fn pairing_algebra(field: Fp, n: usize, zslices: &[FpMatrix]) -> Result<FieldAlgebra> {
    if zslices.iter().any(|z| z.rows() != n || z.cols() != n) {
        return Err(Error::Dimension("pairing slices must be n x n".into()));
    }
    // radical checks: left {xi : xi^T Z_s = 0}, right {eta : Z_s eta = 0}
    let mut left = RowReducer::new(field, n);
    let mut right = RowReducer::new(field, n);
    for z in zslices {
        let zt = z.transpose();
        for i in 0..n {
            right.add_row(z.row(i).to_vec());
            left.add_row(zt.row(i).to_vec());
        }
    }
    if left.rank() < n || right.rank() < n {
        return Err(Error::Validation(format!(
            "pairing has nonzero radical (left corank {}, right corank {})",
            n - left.rank(),
            n - right.rank()
        )));
    }

    // unknowns: C[k][i] at k*n + i, C'[k][j] at n^2 + k*n + j
    let m = zslices.len();
    let mut eqs = FpMatrix::zeros(field, m * n * n, 2 * n * n);
    for (s, z) in zslices.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let row = (s * n + i) * n + j;
                for k in 0..n {
                    // + C[k][i] * Z_s[k][j]
                    let c1 = eqs.get(row, k * n + i);
                    eqs.set(row, k * n + i, field.add(c1, z.get(k, j)));
                    // - Z_s[i][k] * C'[k][j]
                    let c2 = eqs.get(row, n * n + k * n + j);
                    eqs.set(row, n * n + k * n + j, field.sub(c2, z.get(i, k)));
                }
            }
        }
    }
    let kernel = eqs.kernel();
    let mut basis = Vec::with_capacity(kernel.len());
    let mut projected = RowReducer::new(field, n * n);
    for v in &kernel {
        let c_entries = &v[..n * n];
        if projected.add_row(c_entries.to_vec()).is_none() {
            return Err(Error::Internal(
                "algebra projection not injective despite zero radical".into(),
            ));
        }
        let rows: Vec<Vec<u32>> = c_entries.chunks(n).map(<[u32]>::to_vec).collect();
        basis.push(FpMatrix::from_rows(field, &rows)?);
    }
    let alg = FieldAlgebra { field, n, basis };

    // closure under multiplication on basis pairs
    for x in &alg.basis {
        for y in &alg.basis {
            if !alg.contains(&x.mul(y)) {
                return Err(Error::violation(
                    "algebra_closure",
                    "basis product falls outside the solved space",
                ));
            }
        }
    }
    // division algebra: no nonzero singular elements (exhaustive at desk scale)
    if alg.order() > MAX_ALGEBRA_ELEMENTS {
        return Err(Error::Capacity {
            what: "algebra element count".into(),
            estimated: alg.order(),
            cap: MAX_ALGEBRA_ELEMENTS,
            hint: None,
        });
    }
    for idx in 1..alg.order() {
        let e = alg.element(idx);
        if !e.is_zero() && !e.is_invertible() {
            return Err(Error::violation(
                "division_algebra",
                "nonzero non-invertible element found; input is outside the analyzed class",
            ));
        }
    }
    Ok(alg)
}

/// M1/M2 selection plus the characteristic matrix of every other atom as a
/// graph over (M1, M2), after the normalization that makes the third
/// abelian atom's matrix the identity whenever at least three abelian atoms
/// exist.
#[derive(Debug, Clone)]
pub struct CharMatrices {
    pub m1: Subspace,
    pub m2: Subspace,
    /// Basis rows spanning M1 (the "x" side), n x d.
    pub x_basis: FpMatrix,
    /// Basis rows spanning M2 (the "y" side), n x d; rebased when
    /// `normalized` so that the third abelian atom has matrix I.
    pub y_basis: FpMatrix,
    /// Remaining atoms in canonical order with their invertible matrices.
    pub others: Vec<(Subspace, FpMatrix)>,
    pub normalized: bool,
}

/// Orders atoms isotropic-first (canonical order within each group), picks
/// M1 and M2, and expresses every other atom as the graph {(xi, C xi)}.
///
/// M2 skips perp(M1): a mutual-centralizer pair has an identically zero
/// pairing between the blocks and supports no graph calculus. When M1 is
/// abelian it is its own perp, so nothing is skipped and the selection
/// agrees with the abelian-first setup.
pub fn characteristic_matrices(f: &AlternatingForm, class: &PosetClass) -> Result<CharMatrices> {
    if class.shape != Shape::Quasiantichain {
        return Err(Error::Refusal(
            "characteristic matrices are defined for quasiantichain lattices".into(),
        ));
    }
    let d = f.dim_v();
    let isotropic: Vec<Subspace> = class
        .atoms
        .iter()
        .filter(|a| f.is_isotropic(a))
        .cloned()
        .collect();
    let non_isotropic: Vec<Subspace> = class
        .atoms
        .iter()
        .filter(|a| !f.is_isotropic(a))
        .cloned()
        .collect();
    let mut ordered = isotropic.clone();
    ordered.extend(non_isotropic);

    let m1 = ordered
        .first()
        .ok_or_else(|| Error::Internal("no atoms".into()))?
        .clone();
    let perp_m1 = f.perp(&m1)?;
    let m2 = ordered
        .iter()
        .skip(1)
        .find(|a| **a != perp_m1)
        .cloned()
        .ok_or_else(|| {
            Error::violation(
                "characteristic_matrices",
                "no companion atom other than perp(M1); width too small",
            )
        })?;
    let n = m1.dim();
    if m2.dim() != n || 2 * n != d {
        return Err(Error::violation(
            "characteristic_matrices",
            format!("atoms have dims {} and {}, ambient {d}", m1.dim(), m2.dim()),
        ));
    }
    if m1.intersect(&m2).dim() != 0 || m1.sum(&m2).dim() != d {
        return Err(Error::violation(
            "characteristic_matrices",
            "chosen atoms are not complementary",
        ));
    }

    let x_basis = m1.basis().clone();
    let mut y_basis = m2.basis().clone();

    let solve_graph = |atom: &Subspace, y_b: &FpMatrix| -> Result<FpMatrix> {
        let t = FpMatrix::vstack(f.field(), &[&x_basis, y_b]);
        let t_inv = t
            .inverse()
            .ok_or_else(|| Error::Internal("basis stack became singular".into()))?;
        let mut xi_cols = FpMatrix::zeros(f.field(), n, n);
        let mut eta_cols = FpMatrix::zeros(f.field(), n, n);
        for col in 0..n {
            let coords = t_inv.vec_mul(atom.basis().row(col));
            for row in 0..n {
                xi_cols.set(row, col, coords[row]);
                eta_cols.set(row, col, coords[n + row]);
            }
        }
        let xi_inv = xi_cols.inverse().ok_or_else(|| {
            Error::violation(
                "characteristic_matrices",
                "atom is not a graph over (M1, M2)",
            )
        })?;
        let c = eta_cols.mul(&xi_inv);
        if !c.is_invertible() {
            return Err(Error::violation(
                "characteristic_matrices",
                "characteristic matrix is singular",
            ));
        }
        Ok(c)
    };

    let mut others: Vec<(Subspace, FpMatrix)> = Vec::new();
    for atom in &class.atoms {
        if *atom == m1 || *atom == m2 {
            continue;
        }
        let c = solve_graph(atom, &y_basis)?;
        others.push((atom.clone(), c));
    }

    // Normalize: with >= 3 abelian atoms, rebase the y side so the third
    // abelian atom's matrix becomes the identity.
    let mut normalized = false;
    if isotropic.len() >= 3 {
        let m3 = isotropic[2].clone();
        let c3 = others
            .iter()
            .find(|(a, _)| *a == m3)
            .map(|(_, c)| c.clone())
            .ok_or_else(|| Error::Internal("third abelian atom missing from graph list".into()))?;
        let c3_inv = c3
            .inverse()
            .ok_or_else(|| Error::Internal("characteristic matrices are invertible".into()))?;
        y_basis = c3.transpose().mul(&y_basis);
        for (_, c) in &mut others {
            *c = c3_inv.mul(c);
        }
        normalized = true;
    }

    Ok(CharMatrices {
        m1,
        m2,
        x_basis,
        y_basis,
        others,
        normalized,
    })
}

/// Verifies the atom correspondence: the graph of every nonzero algebra
/// element over (x, y) must be n-dimensional and attain the maximal
/// measure. A failure here falsifies the construction or reveals a bug.
fn verify_graphs(
    f: &AlternatingForm,
    alg: &FieldAlgebra,
    x_basis: &FpMatrix,
    y_basis: &FpMatrix,
    m_star_exp: u64,
) -> Result<()> {
    let n = x_basis.rows();
    for idx in 1..alg.order() {
        let c = alg.element(idx);
        let graph_basis = x_basis.add(&c.transpose().mul(y_basis));
        let graph = Subspace::from_rows(&graph_basis);
        if graph.dim() != n {
            return Err(Error::violation(
                "atom_algebra",
                "graph of a nonzero algebra element degenerated",
            ));
        }
        let exp = f.measure_exponent_of_basis(graph.basis());
        if exp != m_star_exp {
            return Err(Error::violation(
                "atom_algebra",
                format!(
                    "graph of a nonzero algebra element has measure exponent {exp}, expected {m_star_exp}"
                ),
            ));
        }
    }
    Ok(())
}

/// The algebra attached to a complementary pair of atoms via their cross
/// pairing, with the graph-membership verification.
pub fn atom_algebra(
    f: &AlternatingForm,
    x_basis: &FpMatrix,
    y_basis: &FpMatrix,
    m_star_exp: u64,
) -> Result<FieldAlgebra> {
    let n = x_basis.rows();
    let zslices = pairing_slices(f, x_basis, y_basis);
    let alg = pairing_algebra(f.field(), n, &zslices)?;
    verify_graphs(f, &alg, x_basis, y_basis, m_star_exp)?;
    Ok(alg)
}

/// The algebra of a family form over its construction blocks. Families 1
/// and 2 carry the defining pairing between X and Y. In families 3 and 4,
/// X and Y are mutual centralizers (their cross pairing vanishes) and the
/// structure lives on the X-against-X pairing instead; the atoms are still
/// graphs from X to Y, so that is where the graphs get verified.
pub fn family_block_algebra(f: &AlternatingForm) -> Result<FieldAlgebra> {
    let meta = f
        .meta()
        .ok_or_else(|| Error::InvalidParams("family metadata required".into()))?
        .clone();
    let n = meta.n();
    let d = f.dim_v();
    meta.check_layout(d)?;
    let field = f.field();
    let block = |from: usize, to: usize| -> FpMatrix {
        let rows: Vec<Vec<u32>> = (from..to)
            .map(|i| {
                let mut row = vec![0u32; d];
                row[i] = 1;
                row
            })
            .collect();
        FpMatrix::from_rows(field, &rows).expect("block rows")
    };
    let x = block(meta.x_block[0], meta.x_block[1]);
    let y = block(meta.y_block[0], meta.y_block[1]);
    let m_star = 2 * f.dim_w() as u64 + d as u64;
    match meta.family {
        1 | 2 => atom_algebra(f, &x, &y, m_star),
        _ => {
            let zslices = pairing_slices(f, &x, &x);
            let alg = pairing_algebra(field, n, &zslices)?;
            verify_graphs(f, &alg, &x, &y, m_star)?;
            Ok(alg)
        }
    }
}

/// The subfield {C in V : C^T Z_s = Z_s C}; its nonzero elements are
/// exactly the matrices of the abelian atoms other than M1, M2.
pub fn symmetric_subfield(alg: &FieldAlgebra, zslices: &[FpMatrix]) -> Result<FieldAlgebra> {
    let field = alg.field();
    let n = alg.ambient_dim();
    let dim = alg.dim();
    // coefficient-space system: columns index basis elements
    let mut eqs = FpMatrix::zeros(field, zslices.len() * n * n, dim);
    for (bi, b) in alg.basis().iter().enumerate() {
        for (s, z) in zslices.iter().enumerate() {
            let diff = b.transpose().mul(z).sub(&z.mul(b));
            for i in 0..n {
                for j in 0..n {
                    eqs.set((s * n + i) * n + j, bi, diff.get(i, j));
                }
            }
        }
    }
    let kernel = eqs.kernel();
    let basis = kernel
        .iter()
        .map(|coeffs| {
            let mut acc = FpMatrix::zeros(field, n, n);
            for (bi, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    acc = acc.add(&alg.basis()[bi].scale(c));
                }
            }
            acc
        })
        .collect();
    Ok(FieldAlgebra {
        field,
        n,
        basis,
    })
}

/// A generator of the algebra's multiplicative group, found by scanning
/// elements in canonical order; deterministic.
pub fn primitive_element(alg: &FieldAlgebra) -> Result<FpMatrix> {
    let target = alg.order() - 1;
    for idx in 1..alg.order() {
        let e = alg.element(idx);
        if matrix_order(&e)? == MatrixOrder::Finite(target) {
            return Ok(e);
        }
    }
    Err(Error::Internal(
        "no primitive element found in a finite field".into(),
    ))
}

/// Finds the unique k with A^T Z_s = Z_s A^k for every slice, verifies it
/// is a p-power, and returns the exponent e in [1, a] (e = a encodes k = 1,
/// since A^{p^a} = A). Requires the pairing to be symmetric slice-wise,
/// which is what the C3 = I normalization guarantees.
pub fn frobenius_exponent(
    a_mat: &FpMatrix,
    zslices: &[FpMatrix],
    a_dim: usize,
) -> Result<usize> {
    if zslices.iter().any(|z| !z.is_symmetric()) {
        return Err(Error::violation(
            "frobenius_exponent",
            "pairing is not symmetric slice-wise; needs >= 3 abelian atoms and normalization",
        ));
    }
    let p = a_mat.field().modulus() as u128;
    let order = p.pow(a_dim as u32) - 1;
    let lhs: Vec<FpMatrix> = zslices.iter().map(|z| a_mat.transpose().mul(z)).collect();
    let mut power = a_mat.clone();
    let mut found = None;
    for k in 1..=order {
        if zslices
            .iter()
            .zip(&lhs)
            .all(|(z, l)| &z.mul(&power) == l)
        {
            found = Some(k);
            break;
        }
        power = power.mul(a_mat);
    }
    let Some(k) = found else {
        return Err(Error::violation(
            "frobenius_exponent",
            "no exponent k with A^T Z = Z A^k",
        ));
    };
    if k == 1 {
        return Ok(a_dim);
    }
    for e in 1..a_dim {
        if p.pow(e as u32) == k {
            return Ok(e);
        }
    }
    Err(Error::violation(
        "frobenius_exponent",
        format!("k = {k} is not a power of p"),
    ))
}

/// Minimal polynomial by finding the first linear dependence among
/// I, M, M^2, ...
pub fn minimal_polynomial(m: &FpMatrix) -> FpPoly {
    assert!(m.is_square());
    let field = m.field();
    let n = m.rows();
    let mut powers: Vec<FpMatrix> = vec![FpMatrix::identity(field, n)];
    let mut red = RowReducer::new(field, n * n);
    red.add_row(powers[0].entries().to_vec());
    loop {
        let next = powers.last().unwrap().mul(m);
        if red.add_row(next.entries().to_vec()).is_none() {
            // next = sum of lower powers: solve for the coefficients
            let k = powers.len();
            let mut sys = FpMatrix::zeros(field, n * n, k + 1);
            for (col, pw) in powers.iter().enumerate() {
                for (rowi, &e) in pw.entries().iter().enumerate() {
                    sys.set(rowi, col, e);
                }
            }
            for (rowi, &e) in next.entries().iter().enumerate() {
                sys.set(rowi, k, e);
            }
            let red_sys = sys.rref();
            // [A | b] with A of full column rank reduces to [I | lambda]
            let mut lambda = vec![0u32; k];
            for (row, &pc) in red_sys.pivots.iter().enumerate() {
                debug_assert!(pc < k, "rhs must be dependent");
                lambda[pc] = red_sys.matrix.get(row, k);
            }
            // minimal polynomial x^k - sum lambda_i x^i
            let mut poly = vec![0u32; k + 1];
            for i in 0..k {
                poly[i] = field.neg(lambda[i]);
            }
            poly[k] = 1;
            return FpPoly::new(field, poly);
        }
        powers.push(next);
    }
}

/// Block-companion basis of a matrix whose minimal polynomial is
/// irreducible of degree a dividing n: greedily picks v outside the
/// accumulated invariant span and extends by v, Av, ..., A^{a-1}v, n/a
/// times. Returns S with S^{-1} A S = Diag(B, ..., B), B the companion
/// matrix of the minimal polynomial.
pub fn cyclic_decomposition(a_mat: &FpMatrix) -> Result<FpMatrix> {
    let field = a_mat.field();
    let n = a_mat.rows();
    let minpoly = minimal_polynomial(a_mat);
    let a = minpoly
        .degree()
        .ok_or_else(|| Error::Internal("zero minimal polynomial".into()))?;
    if !minpoly.is_irreducible() {
        return Err(Error::Refusal(format!(
            "minimal polynomial {minpoly} is reducible; cyclic decomposition into \
             companion blocks needs an irreducible one"
        )));
    }
    if !n.is_multiple_of(a) {
        return Err(Error::Internal(format!(
            "irreducible minimal polynomial degree {a} must divide {n}"
        )));
    }
    let r = n / a;
    let mut span = RowReducer::new(field, n);
    let mut columns: Vec<Vec<u32>> = Vec::with_capacity(n);
    for _ in 0..r {
        let seed = (0..n)
            .map(|i| {
                let mut v = vec![0u32; n];
                v[i] = 1;
                v
            })
            .find(|v| !span.contains(v))
            .ok_or_else(|| Error::Internal("span exhausted early".into()))?;
        let mut w = seed;
        for _ in 0..a {
            span.add_row(w.clone());
            columns.push(w.clone());
            w = a_mat.mul_vec(&w);
        }
    }
    let mut s = FpMatrix::zeros(field, n, n);
    for (col, v) in columns.iter().enumerate() {
        for (row, &val) in v.iter().enumerate() {
            s.set(row, col, val);
        }
    }
    let s_inv = s
        .inverse()
        .ok_or_else(|| Error::Internal("greedy cyclic basis must be invertible".into()))?;
    // postcondition: S^-1 A S is the block-diagonal companion form
    let b = companion_matrix(&minpoly)?;
    let conj = s_inv.mul(&a_mat.mul(&s));
    let mut expected = FpMatrix::zeros(field, n, n);
    for blk in 0..r {
        for i in 0..a {
            for j in 0..a {
                expected.set(blk * a + i, blk * a + j, b.get(i, j));
            }
        }
    }
    if conj != expected {
        return Err(Error::Internal(
            "cyclic decomposition postcondition failed".into(),
        ));
    }
    Ok(s)
}

/// Outcome of the end-to-end width/abelian-count analysis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub w: usize,
    pub t: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_obs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_obs: Option<usize>,
    /// "a=b", "a=2b", "t<=2", or "violation".
    pub relation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divides_n: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_step: Option<String>,
}

impl AnalysisReport {
    fn violation(w: usize, t: usize, step: &str, detail: String) -> AnalysisReport {
        AnalysisReport {
            w,
            t,
            a_obs: None,
            e: None,
            b_obs: None,
            relation: "violation".into(),
            divides_n: None,
            failing_step: Some(format!("{step}: {detail}")),
        }
    }
}

/// Runs the whole pipeline on a classified lattice: characteristic
/// matrices, the algebra, and (when more than two abelian atoms exist) the
/// subfield, the primitive element, and the Frobenius exponent. A
/// quasiantichain is required; within it, any step failure is reported as
/// relation "violation" with the failing step named, never coerced.
pub fn analyze(f: &AlternatingForm, res: &CdResult) -> Result<AnalysisReport> {
    crate::cdcore::ensure_valid(f)?;
    let class = classify(res, f)?;
    if class.shape != Shape::Quasiantichain {
        return Err(Error::Refusal(format!(
            "analysis needs a quasiantichain lattice; this one is {:?}",
            class.shape
        )));
    }
    let w = class.w.expect("quasiantichain has width");
    let t = class.t.expect("quasiantichain has abelian count");
    let p = f.field().modulus() as u128;

    macro_rules! step {
        ($name:literal, $expr:expr) => {
            match $expr {
                Ok(v) => v,
                Err(err) => {
                    return Ok(AnalysisReport::violation(w, t, $name, err.to_string()));
                }
            }
        };
    }

    // w = p^a + 1
    let Some(a_obs) = exact_log(p, (w - 1) as u128) else {
        return Ok(AnalysisReport::violation(
            w,
            t,
            "width_law",
            format!("w - 1 = {} is not a power of p = {p}", w - 1),
        ));
    };

    let charm = step!("characteristic_matrices", characteristic_matrices(f, &class));
    let zslices = pairing_slices(f, &charm.x_basis, &charm.y_basis);
    let alg = step!(
        "algebra",
        atom_algebra(f, &charm.x_basis, &charm.y_basis, res.m_star_exp)
    );
    if alg.dim() != a_obs {
        return Ok(AnalysisReport::violation(
            w,
            t,
            "algebra",
            format!("|V| = p^{}, expected p^{a_obs} from the width", alg.dim()),
        ));
    }
    // the characteristic matrices plus zero are exactly the algebra
    let from_atoms: HashSet<&FpMatrix> = charm.others.iter().map(|(_, c)| c).collect();
    let elements = alg.elements();
    let from_algebra: HashSet<&FpMatrix> = elements.iter().filter(|e| !e.is_zero()).collect();
    if from_atoms != from_algebra {
        return Ok(AnalysisReport::violation(
            w,
            t,
            "atom_correspondence",
            "characteristic matrices do not match the algebra's nonzero elements".into(),
        ));
    }

    let n = charm.m1.dim();
    let divides_n = n % a_obs == 0;

    if t <= 2 {
        return Ok(AnalysisReport {
            w,
            t,
            a_obs: Some(a_obs),
            e: None,
            b_obs: None,
            relation: "t<=2".into(),
            divides_n: Some(divides_n),
            failing_step: None,
        });
    }

    let subfield = step!("symmetric_subfield", symmetric_subfield(&alg, &zslices));
    let b_dim = subfield.dim();
    if p.pow(b_dim as u32) != (t - 1) as u128 {
        return Ok(AnalysisReport::violation(
            w,
            t,
            "symmetric_subfield",
            format!("|W| = p^{b_dim} does not match t - 1 = {}", t - 1),
        ));
    }
    let prim = step!("primitive_element", primitive_element(&alg));
    let e = step!(
        "frobenius_exponent",
        frobenius_exponent(&prim, &zslices, a_obs)
    );
    let b_obs = gcd(a_obs, e);
    if b_obs != b_dim {
        return Ok(AnalysisReport::violation(
            w,
            t,
            "frobenius_exponent",
            format!("gcd(a, e) = {b_obs} disagrees with dim W = {b_dim}"),
        ));
    }
    let relation = if a_obs == b_obs {
        "a=b"
    } else if a_obs == 2 * b_obs {
        "a=2b"
    } else {
        return Ok(AnalysisReport::violation(
            w,
            t,
            "relation",
            format!("a = {a_obs}, b = {b_obs}: neither a=b nor a=2b"),
        ));
    };
    Ok(AnalysisReport {
        w,
        t,
        a_obs: Some(a_obs),
        e: Some(e),
        b_obs: Some(b_obs),
        relation: relation.into(),
        divides_n: Some(divides_n),
        failing_step: None,
    })
}

fn exact_log(base: u128, value: u128) -> Option<usize> {
    let mut acc = base;
    let mut exp = 1usize;
    while acc < value {
        acc = acc.checked_mul(base)?;
        exp += 1;
    }
    (acc == value).then_some(exp)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
