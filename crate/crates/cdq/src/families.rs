//! The four explicit families of class-2 p-groups whose Chermak-Delgado
//! lattices are quasiantichains, built directly as alternating forms.
//!
//! All four share a common skeleton: V = F_p^{2n} splits into an X block and
//! a Y block of dimension n = a*r each, and the nonzero pairings are laid
//! out in a x a blocks whose first row is a run of fresh W basis vectors and
//! whose later rows are obtained by right-multiplying the first row by
//! powers of a fixed companion matrix B of a primitive polynomial.
//!
//! - Family 1 pairs X against Y on blocks u <= v (rows stepped by B);
//!   everything inside X and inside Y commutes.
//! - Family 2 pairs X against Y on blocks u < v only, rows stepped by
//!   B^{p^b} where a = 2b.
//! - Family 3 is anticommutative instead: X pairs with itself (blocks
//!   u < v, rows stepped by B), Y mirrors X with the opposite sign, and
//!   X commutes with Y elementwise.
//! - Family 4 is family 3 with the Y-side scaled by a quadratic
//!   non-residue.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffalg::{
    companion_matrix, find_primitive_polynomial, matrix_order, Fp, FpMatrix, FpPoly, MatrixOrder,
};
use crate::formspace::{AlternatingForm, MAX_FORM_DIM};

/// Construction parameters. `poly` and `nu` default when absent.
#[derive(Debug, Clone)]
pub struct FamilyParams {
    pub family: u8,
    pub p: u32,
    pub a: usize,
    pub r: usize,
    pub poly: Option<FpPoly>,
    pub nu: Option<u32>,
}

/// The invariants a family construction is built to have.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicted {
    /// Quasiantichain width p^a + 1.
    pub w: u128,
    /// Number of abelian atoms.
    pub t: u128,
    /// log_p of the maximal measure.
    pub m_star_exp: u64,
    /// log_p |G|.
    pub order_exp: u64,
    /// log_p |Z(G)|.
    pub center_exp: u64,
}

/// Family parameters embedded in the form file so downstream passes can run
/// without being handed the construction again.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMeta {
    pub family: u8,
    pub a: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    pub r: usize,
    /// Coefficients of the primitive polynomial, low to high, monic.
    pub poly: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<u32>,
    /// Half-open coordinate ranges of the two blocks.
    pub x_block: [usize; 2],
    pub y_block: [usize; 2],
}

impl FamilyMeta {
    pub fn n(&self) -> usize {
        self.a * self.r
    }

    pub fn poly(&self, field: Fp) -> FpPoly {
        FpPoly::new(field, self.poly.clone())
    }

    /// Consistency of the block layout against the form's dimension.
    pub fn check_layout(&self, d: usize) -> Result<()> {
        let n = self.n();
        if 2 * n != d || self.x_block != [0, n] || self.y_block != [n, d] {
            return Err(Error::Validation(format!(
                "metadata blocks {:?}/{:?} do not tile a form of dimension {d}",
                self.x_block, self.y_block
            )));
        }
        Ok(())
    }
}

/// Reconstructs construction parameters from a form's embedded metadata,
/// the route the CLI's construct-free verification takes.
pub fn params_from_form(form: &AlternatingForm) -> Result<FamilyParams> {
    let meta = form
        .meta()
        .ok_or_else(|| Error::InvalidParams("form carries no family metadata".into()))?;
    Ok(FamilyParams {
        family: meta.family,
        p: form.field().modulus(),
        a: meta.a,
        r: meta.r,
        poly: Some(meta.poly(form.field())),
        nu: meta.nu,
    })
}

/// Smallest quadratic non-residue mod an odd prime, by exhausting squares.
pub fn quadratic_nonresidue(p: u32) -> Result<u32> {
    if p == 2 {
        return Err(Error::InvalidParams(
            "quadratic non-residues need an odd prime".into(),
        ));
    }
    let field = Fp::new(p)?;
    let squares: std::collections::HashSet<u32> =
        field.residues().map(|x| field.mul(x, x)).collect();
    (2..p)
        .find(|v| !squares.contains(v))
        .ok_or_else(|| Error::Internal(format!("no non-residue mod {p}; not prime?")))
}

fn validate(params: &FamilyParams) -> Result<(Fp, usize)> {
    let field = Fp::new(params.p)?;
    let FamilyParams { family, a, r, .. } = *params;
    if !(1..=4).contains(&family) {
        return Err(Error::InvalidParams(format!(
            "family must be 1..=4, got {family}"
        )));
    }
    if a == 0 {
        return Err(Error::InvalidParams("family needs a >= 1".into()));
    }
    if r == 0 {
        return Err(Error::InvalidParams("family needs r >= 1".into()));
    }
    match family {
        2 => {
            if a % 2 != 0 {
                return Err(Error::InvalidParams(format!(
                    "family 2 needs a even (a = 2b), got a = {a}"
                )));
            }
            if r < 3 {
                return Err(Error::InvalidParams(format!(
                    "family 2 needs r >= 3, got r = {r}"
                )));
            }
        }
        3 => {
            if r < 3 {
                return Err(Error::InvalidParams(format!(
                    "family 3 needs r >= 3, got r = {r}"
                )));
            }
        }
        4 => {
            if params.p == 2 {
                return Err(Error::InvalidParams("family 4 needs an odd prime".into()));
            }
            if a % 2 == 0 {
                return Err(Error::InvalidParams(format!(
                    "family 4 needs a odd, got a = {a}"
                )));
            }
            if r < 3 {
                return Err(Error::InvalidParams(format!(
                    "family 4 needs r >= 3, got r = {r}"
                )));
            }
        }
        _ => {}
    }
    let n = a * r;
    if 2 * n > MAX_FORM_DIM {
        return Err(Error::Envelope(format!(
            "d = 2ar = {} exceeds the {MAX_FORM_DIM} cap",
            2 * n
        )));
    }
    Ok((field, n))
}

/// Number of W coordinates the family uses.
fn w_dim(family: u8, a: usize, r: usize) -> usize {
    match family {
        1 => a * r * (r + 1) / 2,
        _ => a * r * (r - 1) / 2,
    }
}

pub fn predicted(params: &FamilyParams) -> Result<Predicted> {
    let (_, n) = validate(params)?;
    let p = params.p as u128;
    let pa = p.pow(params.a as u32);
    let n64 = n as u64;
    let m = w_dim(params.family, params.a, params.r) as u64;
    let (w, t) = match params.family {
        1 => (pa + 1, pa + 1),
        2 => (pa + 1, p.pow((params.a / 2) as u32) + 1),
        3 => (pa + 1, if params.p == 2 { 1 } else { 2 }),
        _ => (pa + 1, 0),
    };
    Ok(Predicted {
        w,
        t,
        m_star_exp: 2 * m + 2 * n64,
        order_exp: 2 * n64 + m,
        center_exp: m,
    })
}

/// Resolves the primitive polynomial: validates a supplied one (monic,
/// degree a, companion of full multiplicative order) or searches for the
/// canonical smallest one.
fn resolve_poly(field: Fp, a: usize, given: Option<&FpPoly>) -> Result<FpPoly> {
    let Some(poly) = given else {
        return find_primitive_polynomial(field, a);
    };
    if poly.field() != field {
        return Err(Error::InvalidParams(format!(
            "polynomial lives over F_{}, construction over F_{}",
            poly.field().modulus(),
            field.modulus()
        )));
    }
    if poly.degree() != Some(a) || !poly.is_monic() {
        return Err(Error::InvalidParams(format!(
            "polynomial must be monic of degree {a}, got {poly}"
        )));
    }
    let b = companion_matrix(poly)?;
    let target = (field.modulus() as u128).pow(a as u32) - 1;
    if matrix_order(&b)? != MatrixOrder::Finite(target) {
        return Err(Error::InvalidParams(format!(
            "polynomial {poly} is not primitive: companion order is not p^{a}-1"
        )));
    }
    Ok(poly.clone())
}

/// Builds the family's n x n W-valued pairing matrix as `m` scalar slices.
///
/// `include_diagonal` covers blocks u = v (family 1 only); `row_step` is the
/// exponent step between consecutive block rows (1, or p^b for family 2);
/// `lower_sign` is +1 when the lower blocks are plain transposes and -1
/// when they carry the alternating sign (families 3/4).
fn build_pairing(
    field: Fp,
    a: usize,
    r: usize,
    b_mat: &FpMatrix,
    include_diagonal: bool,
    row_step: u128,
    lower_sign: i64,
) -> Vec<FpMatrix> {
    let n = a * r;
    // B^{k * row_step} for block row k
    let powers: Vec<FpMatrix> = (0..a as u128)
        .map(|k| b_mat.pow(k * row_step))
        .collect();
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    for u in 0..r {
        let start = if include_diagonal { u } else { u + 1 };
        for v in start..r {
            blocks.push((u, v));
        }
    }
    let m = blocks.len() * a;
    let mut slices = vec![FpMatrix::zeros(field, n, n); m];
    for (bi, &(u, v)) in blocks.iter().enumerate() {
        for l in 0..a {
            let slice = &mut slices[bi * a + l];
            for (k, power) in powers.iter().enumerate() {
                for j in 0..a {
                    let val = power.get(l, j);
                    if val == 0 {
                        continue;
                    }
                    slice.set(u * a + k, v * a + j, val);
                    if u != v {
                        let mirrored = if lower_sign >= 0 { val } else { field.neg(val) };
                        slice.set(v * a + j, u * a + k, mirrored);
                    }
                }
            }
        }
    }
    slices
}

/// Constructs the family as a validated alternating form together with the
/// family's predicted invariants. Identical parameters (including the
/// polynomial) produce bit-identical output.
pub fn build_family(params: &FamilyParams) -> Result<(AlternatingForm, Predicted)> {
    let (field, n) = validate(params)?;
    let FamilyParams { family, a, r, .. } = *params;
    let d = 2 * n;
    let poly = resolve_poly(field, a, params.poly.as_ref())?;
    let b_mat = companion_matrix(&poly)?;
    let pred = predicted(params)?;

    let nu = match family {
        4 => {
            let smallest = quadratic_nonresidue(params.p)?;
            let nu = params.nu.unwrap_or(smallest);
            let sq: std::collections::HashSet<u32> =
                field.residues().map(|x| field.mul(x, x)).collect();
            if nu.is_multiple_of(params.p) || sq.contains(&(nu % params.p)) {
                return Err(Error::InvalidParams(format!(
                    "nu = {nu} is a square mod {}, need a quadratic non-residue",
                    params.p
                )));
            }
            Some(nu % params.p)
        }
        _ => {
            if params.nu.is_some() {
                return Err(Error::InvalidParams(
                    "nu only applies to family 4".into(),
                ));
            }
            None
        }
    };

    let b_exp = (family == 2).then_some(a / 2);
    let row_step = match b_exp {
        Some(b) => (params.p as u128).pow(b as u32),
        None => 1,
    };

    let pairing = match family {
        1 => build_pairing(field, a, r, &b_mat, true, 1, 1),
        2 => build_pairing(field, a, r, &b_mat, false, row_step, 1),
        _ => build_pairing(field, a, r, &b_mat, false, 1, -1),
    };
    let m = pairing.len();
    debug_assert_eq!(m, w_dim(family, a, r));

    // Assemble the full d x d slices from the n x n pairing.
    let slices: Vec<FpMatrix> = pairing
        .iter()
        .map(|z| {
            let mut s = FpMatrix::zeros(field, d, d);
            match family {
                1 | 2 => {
                    // cross pairing: b(x_i, y_j) = z_ij, b(y_j, x_i) = -z_ij
                    for i in 0..n {
                        for j in 0..n {
                            let v = z.get(i, j);
                            if v != 0 {
                                s.set(i, n + j, v);
                                s.set(n + j, i, field.neg(v));
                            }
                        }
                    }
                }
                _ => {
                    // x-x pairing is z, y-y pairing is -z (times nu for family 4)
                    let y_scale = match nu {
                        Some(nu) => field.neg(nu),
                        None => field.neg(1),
                    };
                    for i in 0..n {
                        for j in 0..n {
                            let v = z.get(i, j);
                            if v != 0 {
                                s.set(i, j, v);
                                s.set(n + i, n + j, field.mul(v, y_scale));
                            }
                        }
                    }
                }
            }
            s
        })
        .collect();

    let meta = FamilyMeta {
        family,
        a,
        b: b_exp,
        r,
        poly: poly.coeffs().to_vec(),
        nu,
        x_block: [0, n],
        y_block: [n, d],
    };
    let form = AlternatingForm::new(field, d, slices, Some(meta))?;
    Ok((form, pred))
}
