//! Currying and uncurrying of derivative-carrying maps.
//!
//! The plain transposes are exact mutual inverses on every φ table:
//!
//!   λ(φ)(z,γ)(x,α) = φ((z,x),(γ,α))      ev(ψ)((z,x),(γ,α)) = ψ(z,γ)(x,α)
//!
//! Validity is preserved by ev unconditionally and by λ exactly when the
//! outer space Z is reflexive over an integral quantale; with a non-reflexive
//! Z the exponential distance picks up self-variation terms b(f(z,x), f(z,y))
//! through any admissible neighbour z′ that the product derivative never
//! sees, and λ of a valid map can fail the map condition. Tests pin a
//! witness.
//!
//! The reflexive variant corrects both directions,
//!
//!   λ^r(φ)(z,γ) = λ(φ)(z,γ) ⇐ D(f_z)      ev^r(ψ)((z,x),(γ,α)) = ψ ∨ D(f_z)
//!
//! with f_z the slice x ↦ f(z,x). On valid maps ev^r ∘ λ^r is the identity;
//! λ^r ∘ ev^r is the normalization N(ψ) = (ψ ∨ D(f_z)) ⇐ D(f_z), so the
//! reflexive transposes biject valid product maps with valid normalized maps.

use super::{derivative, dom_elements_of, pair_idx, FiniteQlr, FiniteQlrMap};
use crate::quantale::{QuantaleElem, QuantaleError, Result};

fn func_code(f: &[usize], ny: usize) -> usize {
    f.iter().fold(0, |acc, &v| acc * ny + v)
}

fn decode_func(code: usize, nx: usize, ny: usize) -> Vec<usize> {
    let mut f = vec![0usize; nx];
    let mut c = code;
    for slot in (0..nx).rev() {
        f[slot] = c % ny;
        c /= ny;
    }
    f
}

struct Shapes {
    nz: usize,
    nx: usize,
    ny: usize,
    /// carrier of the Z quantale, columns of an exp-side φ row
    ze: Vec<QuantaleElem>,
    /// carrier of the X quantale; probe keys are x-major over this
    xe: Vec<QuantaleElem>,
}

impl Shapes {
    fn of(z: &FiniteQlr, x: &FiniteQlr, y: &FiniteQlr) -> Result<Shapes> {
        Ok(Shapes {
            nz: z.size(),
            nx: x.size(),
            ny: y.size(),
            ze: dom_elements_of(&z.quantale)?,
            xe: dom_elements_of(&x.quantale)?,
        })
    }

    /// column of (γ_gi, α_ai) in a product-side φ row
    fn prod_col(&self, gi: usize, ai: usize) -> usize {
        gi * self.xe.len() + ai
    }

    /// slot of the probe key (x_xi, α_ai) in an exponential Table
    fn key_slot(&self, xi: usize, ai: usize) -> usize {
        xi * self.xe.len() + ai
    }

    fn check_product_map(&self, m: &FiniteQlrMap) -> Result<()> {
        let pts = self.nz * self.nx;
        let cols = self.ze.len() * self.xe.len();
        if m.f.len() != pts
            || m.f.iter().any(|&v| v >= self.ny)
            || m.phi.len() != pts
            || m.phi.iter().any(|row| row.len() != cols)
        {
            return Err(QuantaleError::Shape(
                "map tables do not fit the product of the given spaces".into(),
            ));
        }
        Ok(())
    }

    fn check_exp_map(&self, m: &FiniteQlrMap) -> Result<()> {
        let nf = self.ny.pow(self.nx as u32);
        let keys = self.nx * self.xe.len();
        if m.f.len() != self.nz || m.f.iter().any(|&v| v >= nf) || m.phi.len() != self.nz {
            return Err(QuantaleError::Shape(
                "map tables do not fit the exponential of the given spaces".into(),
            ));
        }
        for row in &m.phi {
            if row.len() != self.ze.len()
                || row.iter().any(|e| e.as_table().map_or(true, |t| t.len() != keys))
            {
                return Err(QuantaleError::Shape(
                    "exponential derivative entries must be tables over the probe keys".into(),
                ));
            }
        }
        Ok(())
    }

    /// D(f_z) for the slice f_z = x ↦ f(z,x), aligned with the probe keys.
    fn slice_derivative(
        &self,
        x: &FiniteQlr,
        y: &FiniteQlr,
        slice: &[usize],
    ) -> Result<Vec<QuantaleElem>> {
        let mut out = Vec::with_capacity(self.nx * self.xe.len());
        for xi in 0..self.nx {
            for a in &self.xe {
                out.push(derivative(x, y, slice, xi, a)?);
            }
        }
        Ok(out)
    }
}

fn slice_at(m: &FiniteQlrMap, zi: usize, nx: usize) -> Vec<usize> {
    (0..nx).map(|xi| m.f[pair_idx(zi, xi, nx)]).collect()
}

/// Transpose a product map (Z×X → Y) to an exponential map (Z → Y^X).
/// The function part indexes the carrier of the exponential built from the
/// same X and Y; the derivative part is a pure reindexing.
pub fn curry_q(
    z: &FiniteQlr,
    x: &FiniteQlr,
    y: &FiniteQlr,
    m: &FiniteQlrMap,
) -> Result<FiniteQlrMap> {
    let sh = Shapes::of(z, x, y)?;
    sh.check_product_map(m)?;
    let mut f_out = Vec::with_capacity(sh.nz);
    let mut phi_out = Vec::with_capacity(sh.nz);
    for zi in 0..sh.nz {
        f_out.push(func_code(&slice_at(m, zi, sh.nx), sh.ny));
        let mut row = Vec::with_capacity(sh.ze.len());
        for gi in 0..sh.ze.len() {
            let mut table = Vec::with_capacity(sh.nx * sh.xe.len());
            for xi in 0..sh.nx {
                for ai in 0..sh.xe.len() {
                    table.push(m.phi[pair_idx(zi, xi, sh.nx)][sh.prod_col(gi, ai)].clone());
                }
            }
            row.push(QuantaleElem::Table(table));
        }
        phi_out.push(row);
    }
    Ok(FiniteQlrMap::new(f_out, phi_out))
}

/// Transpose an exponential map (Z → Y^X) back to a product map (Z×X → Y).
/// Exact inverse of `curry_q`; preserves validity unconditionally.
pub fn uncurry_q(
    z: &FiniteQlr,
    x: &FiniteQlr,
    y: &FiniteQlr,
    m: &FiniteQlrMap,
) -> Result<FiniteQlrMap> {
    let sh = Shapes::of(z, x, y)?;
    sh.check_exp_map(m)?;
    let pts = sh.nz * sh.nx;
    let mut f_out = vec![0usize; pts];
    let mut phi_out = vec![Vec::new(); pts];
    for zi in 0..sh.nz {
        let slice = decode_func(m.f[zi], sh.nx, sh.ny);
        for xi in 0..sh.nx {
            let p = pair_idx(zi, xi, sh.nx);
            f_out[p] = slice[xi];
            let mut row = Vec::with_capacity(sh.ze.len() * sh.xe.len());
            for gi in 0..sh.ze.len() {
                let table = m.phi[zi][gi].as_table()?;
                for ai in 0..sh.xe.len() {
                    row.push(table[sh.key_slot(xi, ai)].clone());
                }
            }
            phi_out[p] = row;
        }
    }
    Ok(FiniteQlrMap::new(f_out, phi_out))
}

fn check_reflexive_setting(z: &FiniteQlr, x: &FiniteQlr, y: &FiniteQlr) -> Result<()> {
    if !y.quantale.is_heyting() || !y.quantale.has_star_star() {
        return Err(QuantaleError::Unsupported(format!(
            "reflexive transposes need a Heyting codomain quantale with the separation \
             property; {} does not qualify",
            y.quantale.name()
        )));
    }
    if !z.quantale.is_integral() {
        return Err(QuantaleError::Unsupported(format!(
            "reflexive transposes need an integral outer quantale; {} is not",
            z.quantale.name()
        )));
    }
    if !z.is_reflexive()? || !x.is_reflexive()? || !y.is_reflexive()? {
        return Err(QuantaleError::Domain(
            "reflexive transposes require reflexive spaces".into(),
        ));
    }
    Ok(())
}

/// λ^r: curry, then cancel the slice self-variation per outer point,
/// entry ⇐ D(f_z) componentwise over the probe keys.
pub fn curry_qr(
    z: &FiniteQlr,
    x: &FiniteQlr,
    y: &FiniteQlr,
    m: &FiniteQlrMap,
) -> Result<FiniteQlrMap> {
    check_reflexive_setting(z, x, y)?;
    let sh = Shapes::of(z, x, y)?;
    let mut out = curry_q(z, x, y, m)?;
    for zi in 0..sh.nz {
        let d = sh.slice_derivative(x, y, &slice_at(m, zi, sh.nx))?;
        for entry in &mut out.phi[zi] {
            let table = entry.as_table()?;
            let corrected: Result<Vec<QuantaleElem>> = table
                .iter()
                .zip(&d)
                .map(|(e, dk)| y.quantale.heyting_arrow(e, dk))
                .collect();
            *entry = QuantaleElem::Table(corrected?);
        }
    }
    Ok(out)
}

/// ev^r: uncurry, then restore the slice self-variation, entry ∨ D(f_z).
pub fn uncurry_qr(
    z: &FiniteQlr,
    x: &FiniteQlr,
    y: &FiniteQlr,
    m: &FiniteQlrMap,
) -> Result<FiniteQlrMap> {
    check_reflexive_setting(z, x, y)?;
    let sh = Shapes::of(z, x, y)?;
    let mut out = uncurry_q(z, x, y, m)?;
    for zi in 0..sh.nz {
        let slice = decode_func(m.f[zi], sh.nx, sh.ny);
        let d = sh.slice_derivative(x, y, &slice)?;
        for xi in 0..sh.nx {
            let row = &mut out.phi[pair_idx(zi, xi, sh.nx)];
            for gi in 0..sh.ze.len() {
                for ai in 0..sh.xe.len() {
                    let col = sh.prod_col(gi, ai);
                    row[col] = y.quantale.join2(&row[col], &d[sh.key_slot(xi, ai)])?;
                }
            }
        }
    }
    Ok(out)
}

/// N(ψ)(z,γ) = (ψ(z,γ) ∨ D(f_z)) ⇐ D(f_z), the idempotent projection onto
/// the image of λ^r. A map is a reflexive transpose iff N fixes it.
pub fn normalize_qr(
    z: &FiniteQlr,
    x: &FiniteQlr,
    y: &FiniteQlr,
    m: &FiniteQlrMap,
) -> Result<FiniteQlrMap> {
    check_reflexive_setting(z, x, y)?;
    let sh = Shapes::of(z, x, y)?;
    sh.check_exp_map(m)?;
    let mut out = m.clone();
    for zi in 0..sh.nz {
        let slice = decode_func(m.f[zi], sh.nx, sh.ny);
        let d = sh.slice_derivative(x, y, &slice)?;
        for entry in &mut out.phi[zi] {
            let table = entry.as_table()?;
            let fixed: Result<Vec<QuantaleElem>> = table
                .iter()
                .zip(&d)
                .map(|(e, dk)| {
                    let lifted = y.quantale.join2(e, dk)?;
                    y.quantale.heyting_arrow(&lifted, dk)
                })
                .collect();
            *entry = QuantaleElem::Table(fixed?);
        }
    }
    Ok(out)
}
