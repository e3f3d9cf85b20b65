//! W-valued alternating bilinear forms on V = F_p^d.
//!
//! The form stands for commutation in a class-2 p-group G with elementary
//! abelian G/Z(G) and G': V is G/Z(G), W = F_p^m is G', and b(u, v) is the
//! commutator of lifts. W-valued data is stored as m parallel scalar
//! "slices", so every operation is plain F_p linear algebra.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FamilyMeta;
use crate::ffalg::{Fp, FpMatrix, RowReducer};
use crate::formspace::Subspace;

/// Dimension cap for forms; matrices stay desk-sized.
pub const MAX_FORM_DIM: usize = 64;

/// The group datum: m alternating d x d slices over F_p plus optional
/// family metadata carried along in the file format.
#[derive(Debug, Clone)]
pub struct AlternatingForm {
    field: Fp,
    d: usize,
    m: usize,
    slices: Vec<FpMatrix>,
    meta: Option<FamilyMeta>,
    validation: OnceLock<ValidationReport>,
}

impl PartialEq for AlternatingForm {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.d == other.d
            && self.m == other.m
            && self.slices == other.slices
            && self.meta == other.meta
    }
}
impl Eq for AlternatingForm {}

/// Outcome of the three structural checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Every slice is antisymmetric with zero diagonal.
    pub alternating: bool,
    /// The commutator values span all of W (no dead central coordinates).
    pub spans_w: bool,
    /// Dimension of {v : b(v, u) = 0 for all u}; zero means Z(G) = W exactly.
    pub radical_dim: usize,
}

impl ValidationReport {
    pub fn all_good(&self) -> bool {
        self.alternating && self.spans_w && self.radical_dim == 0
    }
}

impl AlternatingForm {
    pub fn new(
        field: Fp,
        d: usize,
        slices: Vec<FpMatrix>,
        meta: Option<FamilyMeta>,
    ) -> Result<AlternatingForm> {
        if d > MAX_FORM_DIM {
            return Err(Error::Envelope(format!(
                "form dimension {d} exceeds the {MAX_FORM_DIM} cap"
            )));
        }
        if slices.len() > MAX_FORM_DIM {
            return Err(Error::Envelope(format!(
                "W dimension {} exceeds the {MAX_FORM_DIM} cap",
                slices.len()
            )));
        }
        for (s, slice) in slices.iter().enumerate() {
            if slice.rows() != d || slice.cols() != d {
                return Err(Error::Dimension(format!(
                    "slice {s} is {}x{}, expected {d}x{d}",
                    slice.rows(),
                    slice.cols()
                )));
            }
            if slice.field() != field {
                return Err(Error::Dimension(format!(
                    "slice {s} lives over F_{}, expected F_{}",
                    slice.field().modulus(),
                    field.modulus()
                )));
            }
        }
        Ok(AlternatingForm {
            field,
            d,
            m: slices.len(),
            slices,
            meta,
            validation: OnceLock::new(),
        })
    }

    pub fn field(&self) -> Fp {
        self.field
    }
    /// Dimension of V = G/Z(G).
    pub fn dim_v(&self) -> usize {
        self.d
    }
    /// Dimension of W = G'.
    pub fn dim_w(&self) -> usize {
        self.m
    }
    pub fn slices(&self) -> &[FpMatrix] {
        &self.slices
    }
    pub fn meta(&self) -> Option<&FamilyMeta> {
        self.meta.as_ref()
    }

    /// Evaluates b(u, v) as a vector in W.
    pub fn eval(&self, u: &[u32], v: &[u32]) -> Vec<u32> {
        assert_eq!(u.len(), self.d);
        assert_eq!(v.len(), self.d);
        let p = self.field.modulus() as u64;
        self.slices
            .iter()
            .map(|s| {
                let mut acc = 0u64;
                for (i, &ui) in u.iter().enumerate() {
                    if ui == 0 {
                        continue;
                    }
                    let row = s.row(i);
                    let mut inner = 0u64;
                    for (j, &vj) in v.iter().enumerate() {
                        inner += row[j] as u64 * vj as u64;
                    }
                    acc += ui as u64 * (inner % p);
                }
                (acc % p) as u32
            })
            .collect()
    }

    /// Runs the three structural checks, cached after the first call.
    pub fn validation(&self) -> &ValidationReport {
        self.validation.get_or_init(|| {
            let alternating = self.slices.iter().all(|s| {
                (0..self.d).all(|i| {
                    s.get(i, i) == 0
                        && (0..i).all(|j| s.get(i, j) == self.field.neg(s.get(j, i)))
                })
            });
            // span of the commutator value vectors (b(e_i, e_j))_{s} in W
            let mut red = RowReducer::new(self.field, self.m);
            'span: for i in 0..self.d {
                for j in (i + 1)..self.d {
                    let v: Vec<u32> = self.slices.iter().map(|s| s.get(i, j)).collect();
                    if red.add_row(v).is_some() && red.rank() == self.m {
                        break 'span;
                    }
                }
            }
            let spans_w = red.rank() == self.m;
            let radical_dim = self.d - self.stacked_rank_full();
            ValidationReport {
                alternating,
                spans_w,
                radical_dim,
            }
        })
    }

    fn stacked_rank_full(&self) -> usize {
        let mut red = RowReducer::new(self.field, self.d);
        for s in &self.slices {
            for i in 0..self.d {
                red.add_row(s.row(i).to_vec());
                if red.rank() == self.d {
                    return self.d;
                }
            }
        }
        red.rank()
    }

    fn ensure_ambient(&self, u: &Subspace) -> Result<()> {
        if u.ambient_dim() != self.d || u.field() != self.field {
            return Err(Error::Ambient(format!(
                "subspace lives in F_{}^{}, form in F_{}^{}",
                u.field().modulus(),
                u.ambient_dim(),
                self.field.modulus(),
                self.d
            )));
        }
        Ok(())
    }

    /// The subspace-level centralizer: {v : b(u, v) = 0 for all u in U},
    /// the kernel of the (m * dim U) x d stacked matrix of rows u^T S_s.
    pub fn perp(&self, u: &Subspace) -> Result<Subspace> {
        self.ensure_ambient(u)?;
        let rows: Vec<Vec<u32>> = self.perp_rows(u.basis()).collect();
        let stacked = FpMatrix::from_rows(self.field, &rows)?;
        let stacked = if rows.is_empty() {
            FpMatrix::zeros(self.field, 0, self.d)
        } else {
            stacked
        };
        let kernel_rows = stacked.kernel();
        if kernel_rows.is_empty() {
            return Ok(Subspace::zero(self.field, self.d));
        }
        let m = FpMatrix::from_rows(self.field, &kernel_rows)?;
        Ok(Subspace::from_rows(&m))
    }

    fn perp_rows<'a>(&'a self, basis: &'a FpMatrix) -> impl Iterator<Item = Vec<u32>> + 'a {
        (0..basis.rows()).flat_map(move |i| {
            let u = basis.row(i);
            self.slices.iter().map(move |s| {
                // u^T S: entry j is sum_i u_i S[i][j]
                let p = self.field.modulus() as u64;
                let mut acc = vec![0u64; self.d];
                for (k, &uk) in u.iter().enumerate() {
                    if uk == 0 {
                        continue;
                    }
                    let row = s.row(k);
                    for j in 0..self.d {
                        acc[j] += uk as u64 * row[j] as u64;
                    }
                }
                acc.iter().map(|&x| (x % p) as u32).collect()
            })
        })
    }

    /// Dimension of perp(U) without materializing it; the hot path of
    /// exhaustive scans. Takes the raw basis matrix.
    pub fn perp_dim_of_basis(&self, basis: &FpMatrix) -> usize {
        let mut red = RowReducer::new(self.field, self.d);
        for row in self.perp_rows(basis) {
            red.add_row(row);
            if red.rank() == self.d {
                return 0;
            }
        }
        self.d - red.rank()
    }

    /// True iff the form vanishes on U x U; the preimage subgroup is then
    /// abelian. Checked on basis pairs (the diagonal is free: alternating).
    pub fn is_isotropic(&self, u: &Subspace) -> bool {
        let b = u.basis();
        for i in 0..b.rows() {
            for j in (i + 1)..b.rows() {
                if self.eval(b.row(i), b.row(j)).iter().any(|&x| x != 0) {
                    return false;
                }
            }
        }
        true
    }

    /// log_p of the Chermak-Delgado measure of the preimage subgroup of U:
    /// 2m + dim U + dim perp(U). Requires a zero radical, otherwise the
    /// center is bigger than W and the bookkeeping here would be wrong.
    pub fn measure_exponent(&self, u: &Subspace) -> Result<u64> {
        self.ensure_ambient(u)?;
        self.ensure_radical_zero()?;
        Ok(self.measure_exponent_of_basis(u.basis()))
    }

    pub(crate) fn ensure_radical_zero(&self) -> Result<()> {
        let report = self.validation();
        if report.radical_dim != 0 {
            return Err(Error::NonzeroRadical(report.radical_dim));
        }
        Ok(())
    }

    /// Unchecked counterpart used inside exhaustive scans (the caller has
    /// already validated the form once).
    pub(crate) fn measure_exponent_of_basis(&self, basis: &FpMatrix) -> u64 {
        (2 * self.m + basis.rows() + self.perp_dim_of_basis(basis)) as u64
    }
}

/// Instance check of the symmetry lemma behind the constructions: if
/// B^T Z = Z B for a companion matrix B, then Z is symmetric. Returns
/// whether the implication holds for this pair (vacuously true when the
/// hypothesis fails).
pub fn lemma_ss_check(b: &FpMatrix, z: &FpMatrix) -> bool {
    let hypothesis = b.transpose().mul(z) == z.mul(b);
    !hypothesis || z.is_symmetric()
}

// ---------------------------------------------------------------------------
// File format

/// Serialized form: the lingua franca of all CLI commands.
#[derive(Debug, Serialize, Deserialize)]
struct FormFile {
    version: u32,
    p: u32,
    d: usize,
    m: usize,
    slices: Vec<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<FamilyMeta>,
}

impl AlternatingForm {
    pub fn to_json(&self) -> serde_json::Value {
        let file = FormFile {
            version: 1,
            p: self.field.modulus(),
            d: self.d,
            m: self.m,
            slices: self.slices.iter().map(|s| s.row_vecs()).collect(),
            meta: self.meta.clone(),
        };
        serde_json::to_value(&file).expect("form serialization cannot fail")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<AlternatingForm> {
        let file: FormFile = serde_json::from_value(value.clone())?;
        if file.version != 1 {
            return Err(Error::Validation(format!(
                "unsupported form file version {}",
                file.version
            )));
        }
        let field = Fp::new(file.p)?;
        if file.slices.len() != file.m {
            return Err(Error::Dimension(format!(
                "file declares m={} but carries {} slices",
                file.m,
                file.slices.len()
            )));
        }
        let slices = file
            .slices
            .iter()
            .map(|rows| FpMatrix::from_rows(field, rows))
            .collect::<Result<Vec<_>>>()?;
        AlternatingForm::new(field, file.d, slices, file.meta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u32) -> Fp {
        Fp::new(p).unwrap()
    }

    fn symplectic_plane(p: u32) -> AlternatingForm {
        let f = fp(p);
        let s = FpMatrix::from_rows_i64(f, &[vec![0, 1], vec![-1, 0]]).unwrap();
        AlternatingForm::new(f, 2, vec![s], None).unwrap()
    }

    #[test]
    fn zero_form_validation() {
        let f = fp(3);
        let form =
            AlternatingForm::new(f, 2, vec![FpMatrix::zeros(f, 2, 2)], None).unwrap();
        let report = form.validation();
        assert!(report.alternating);
        assert!(!report.spans_w);
        assert_eq!(report.radical_dim, 2);
        assert!(form
            .measure_exponent(&Subspace::zero(f, 2))
            .is_err());
    }

    #[test]
    fn symplectic_plane_validation_and_perp() {
        let form = symplectic_plane(3);
        let report = form.validation();
        assert!(report.alternating && report.spans_w);
        assert_eq!(report.radical_dim, 0);

        let f = fp(3);
        let zero = Subspace::zero(f, 2);
        let full = Subspace::full(f, 2);
        assert_eq!(form.perp(&zero).unwrap(), full);
        assert_eq!(form.perp(&full).unwrap(), zero);
        // a line is its own perp
        let line = Subspace::from_rows(&FpMatrix::from_rows(f, &[vec![1, 2]]).unwrap());
        assert_eq!(form.perp(&line).unwrap(), line);
        assert_eq!(form.measure_exponent(&line).unwrap(), 2 + 1 + 1);
    }

    #[test]
    fn low_dimensional_subspaces_are_isotropic() {
        let form = symplectic_plane(5);
        let f = fp(5);
        assert!(form.is_isotropic(&Subspace::zero(f, 2)));
        for c in 0..5u32 {
            let line =
                Subspace::from_rows(&FpMatrix::from_rows(f, &[vec![1, c]]).unwrap());
            assert!(form.is_isotropic(&line));
        }
        assert!(!form.is_isotropic(&Subspace::full(f, 2)));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let f = fp(3);
        let bad = AlternatingForm::new(f, 2, vec![FpMatrix::zeros(f, 2, 3)], None);
        assert!(bad.is_err());
        let form = symplectic_plane(3);
        let alien = Subspace::zero(fp(3), 4);
        assert!(form.perp(&alien).is_err());
    }

    #[test]
    fn lemma_ss_small_cases() {
        let f = fp(2);
        // a = 1 is vacuous
        let b1 = FpMatrix::from_rows(f, &[vec![1]]).unwrap();
        let z1 = FpMatrix::from_rows(f, &[vec![1]]).unwrap();
        assert!(lemma_ss_check(&b1, &z1));
        // a = 2, p = 2: exhaust all first rows, generate second row via B
        let b = FpMatrix::from_rows(f, &[vec![0, 1], vec![1, 1]]).unwrap();
        for bits in 0..4u32 {
            let r1 = vec![bits & 1, (bits >> 1) & 1];
            let r2 = b.transpose().mul_vec(&r1); // row 2 = row 1 * B
            let z = FpMatrix::from_rows(f, &[r1, r2]).unwrap();
            assert_eq!(b.transpose().mul(&z), z.mul(&b));
            assert!(lemma_ss_check(&b, &z));
            assert!(z.is_symmetric());
        }
        // asymmetric Z without the hypothesis: implication vacuous
        let z = FpMatrix::from_rows(f, &[vec![0, 1], vec![0, 0]]).unwrap();
        assert!(lemma_ss_check(&b, &z) == (b.transpose().mul(&z) != z.mul(&b)));
    }

    #[test]
    fn json_round_trip() {
        let form = symplectic_plane(3);
        let json = form.to_json();
        let back = AlternatingForm::from_json(&json).unwrap();
        assert_eq!(form, back);
        assert_eq!(json["version"], 1);
        assert_eq!(json["p"], 3);
        assert_eq!(json["slices"][0][0][1], 1);
        assert_eq!(json["slices"][0][1][0], 2);
    }
}
