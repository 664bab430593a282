//! Ideals generated by two elements: Hermite normal form, norms and generators.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{FieldElement, TotallyRealField};
use crate::error::{Error, Result};
use crate::linalg::{f64_inverse, hermite_rows, kernel_rows, lll_reduce};

/// Default slack on the generator search box.
pub const GENERATOR_SLACK: f64 = 2.0;
const GENERATOR_BUDGET: f64 = 5e6;

/// `d = gcd(α, β)` with witnesses `α u + β w = d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bezout {
    pub d: FieldElement,
    pub u: FieldElement,
    pub w: FieldElement,
}

/// HNF basis of αO + βO; each row is `[coords | u-coords | w-coords]`.
struct IdealBasis {
    rows: Vec<Vec<BigInt>>,
    norm: BigInt,
}

impl TotallyRealField {
    fn ideal_basis(&self, alpha: &[BigInt], beta: &[BigInt]) -> IdealBasis {
        let n = self.degree();
        let mut rows = Vec::with_capacity(2 * n);
        for (g, off) in [(alpha, 0usize), (beta, n)] {
            let ge = FieldElement::from_big_ints(g);
            for j in 0..n {
                let mut e = vec![0i64; n];
                e[j] = 1;
                let prod = self.mul(&ge, &FieldElement::from_ints(&e));
                let mut row: Vec<BigInt> = prod.coords().iter().map(|c| c.to_integer()).collect();
                row.extend((0..2 * n).map(|t| BigInt::from(i32::from(t == off + j))));
                rows.push(row);
            }
        }
        let rows = hermite_rows(rows, n);
        let norm = rows.iter().enumerate().map(|(i, r)| r[i].clone()).product();
        IdealBasis { rows, norm }
    }

    fn integral_pair(&self, alpha: &FieldElement, beta: &FieldElement) -> Result<(Vec<BigInt>, Vec<BigInt>)> {
        if alpha.is_zero() && beta.is_zero() {
            return Err(Error::InvalidInput("gcd(0, 0) is undefined".into()));
        }
        match (alpha.integer_coords(), beta.integer_coords()) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::InvalidInput("gcd expects integral elements".into())),
        }
    }

    /// Norm of the ideal αO + βO.
    pub fn ideal_norm(&self, alpha: &FieldElement, beta: &FieldElement) -> Result<BigInt> {
        let (a, b) = self.integral_pair(alpha, beta)?;
        Ok(self.ideal_basis(&a, &b).norm)
    }

    /// Whether `αO + βO = O`.
    pub fn coprime(&self, alpha: &FieldElement, beta: &FieldElement) -> Result<bool> {
        Ok(self.ideal_norm(alpha, beta)?.is_one())
    }

    /// Canonical generator of αO + βO with Bézout witnesses.
    pub fn gcd(&self, alpha: &FieldElement, beta: &FieldElement) -> Result<Bezout> {
        self.gcd_with_slack(alpha, beta, GENERATOR_SLACK)
    }

    pub fn gcd_with_slack(&self, alpha: &FieldElement, beta: &FieldElement, slack: f64) -> Result<Bezout> {
        let n = self.degree();
        let (a, b) = self.integral_pair(alpha, beta)?;
        let mut basis = self.ideal_basis(&a, &b);
        let z = if basis.norm.is_one() { None } else { Some(self.find_generator(&mut basis, slack)?) };
        let split = |z: &[BigInt]| -> (FieldElement, FieldElement, FieldElement) {
            let mut acc = vec![BigInt::zero(); 3 * n];
            for (zi, row) in z.iter().zip(&basis.rows) {
                for (x, r) in acc.iter_mut().zip(row) {
                    *x += zi * r;
                }
            }
            (
                FieldElement::from_big_ints(&acc[..n]),
                FieldElement::from_big_ints(&acc[n..2 * n]),
                FieldElement::from_big_ints(&acc[2 * n..]),
            )
        };
        let Some(z) = z else {
            // Express 1 in the (triangular) ideal basis.
            let target = self.one_coords();
            let mut z: Vec<BigInt> = Vec::with_capacity(n);
            for col in 0..n {
                let mut t = BigInt::from(target[col]);
                for (i, zi) in z.iter().enumerate() {
                    t -= zi * &basis.rows[i][col];
                }
                z.push(t / &basis.rows[col][col]);
            }
            let (d, u, w) = split(&z);
            debug_assert_eq!(d, self.one());
            return Ok(Bezout { d, u, w });
        };
        let (g, u, w) = split(&z);
        let (g, eta) = self.unit_reduce(&g)?;
        let sign = if self.embed(&g)[0] < 0.0 { -BigRational::one() } else { BigRational::one() };
        let scale = |x: &FieldElement| self.mul(&eta, x).scale(&sign);
        Ok(Bezout { d: g.scale(&sign), u: scale(&u), w: scale(&w) })
    }

    /// Generator β of the denominator ideal {z ∈ O : z·r ∈ O}, unit-reduced
    /// with σ₁(β) > 0. Then r = α/β with α, β coprime.
    pub fn denominator_generator(&self, r: &FieldElement) -> Result<FieldElement> {
        let n = self.degree();
        let d = r.denominator();
        if d.is_one() {
            return Ok(self.one());
        }
        let a = r.scale(&BigRational::from_integer(d.clone()));
        // rows [a·e_i | e_i] and [d·e_k | 0]; the kernel of the leading block is the ideal
        let mut rows = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut e = vec![0i64; n];
            e[i] = 1;
            let prod = self.mul(&a, &FieldElement::from_ints(&e));
            let mut row: Vec<BigInt> = prod.coords().iter().map(|c| c.to_integer()).collect();
            row.extend((0..n).map(|t| BigInt::from(i32::from(t == i))));
            rows.push(row);
        }
        for k in 0..n {
            let mut row = vec![BigInt::zero(); 2 * n];
            row[k] = d.clone();
            rows.push(row);
        }
        let rows = hermite_rows(kernel_rows(rows, n), n);
        let norm: BigInt = rows.iter().enumerate().map(|(i, r)| r[i].clone()).product();
        let mut basis = IdealBasis { rows, norm };
        let z = self.find_generator(&mut basis, GENERATOR_SLACK)?;
        let mut beta = FieldElement::zero(n);
        for (zi, row) in z.iter().zip(&basis.rows) {
            beta = &beta + &FieldElement::from_big_ints(&row[..n]).scale(&BigRational::from_integer(zi.clone()));
        }
        let (beta, _) = self.unit_reduce(&beta)?;
        Ok(if self.embed(&beta)[0] < 0.0 { -&beta } else { beta })
    }

    /// Integer combination of the ideal basis with |N| equal to the ideal norm,
    /// searched inside the box where a unit-reduced generator must live.
    /// The basis is LLL-reduced in place first, so the returned combination
    /// refers to the reduced rows.
    fn find_generator(&self, basis: &mut IdealBasis, slack: f64) -> Result<Vec<BigInt>> {
        let n = self.degree();
        let mut vecs: Vec<Vec<f64>> =
            basis.rows.iter().map(|r| self.embed(&FieldElement::from_big_ints(&r[..n]))).collect();
        lll_reduce(&mut basis.rows, &mut vecs);
        let norm = basis.norm.to_f64().ok_or(Error::GeneratorNotFound)?;
        let root = norm.powf(1.0 / n as f64);
        let span = self.unit_lattice().cell_log_span(n);
        let bounds: Vec<f64> = span.iter().map(|s| slack * root * s.exp()).collect();
        let gens: Vec<FieldElement> = basis.rows.iter().map(|r| FieldElement::from_big_ints(&r[..n])).collect();
        let e: Vec<Vec<f64>> = {
            let cols: Vec<Vec<f64>> = gens.iter().map(|g| self.embed(g)).collect();
            (0..n).map(|j| (0..n).map(|i| cols[i][j]).collect()).collect()
        };
        let einv = f64_inverse(&e).ok_or(Error::GeneratorNotFound)?;
        let reach: Vec<i64> =
            einv.iter().map(|row| row.iter().zip(&bounds).map(|(a, b)| a.abs() * b).sum::<f64>().floor() as i64).collect();
        let volume: f64 = reach.iter().map(|&r| (2 * r + 1) as f64).product();
        if volume > GENERATOR_BUDGET {
            return Err(Error::GeneratorNotFound);
        }
        let lo: Vec<i64> = reach.iter().map(|r| -r).collect();
        let mut found = None;
        crate::enumerate::for_each_in_box(&lo, &reach, |z| {
            if z.iter().all(|&c| c == 0) {
                return true;
            }
            let s: Vec<f64> = e.iter().map(|row| row.iter().zip(z).map(|(a, &c)| a * c as f64).sum()).collect();
            if s.iter().zip(&bounds).any(|(v, b)| v.abs() > b * (1.0 + 1e-9)) {
                return true;
            }
            let approx: f64 = s.iter().product::<f64>().abs();
            if (approx / norm - 1.0).abs() > 1e-6 {
                return true;
            }
            let zb: Vec<BigInt> = z.iter().map(|&c| BigInt::from(c)).collect();
            let mut g = FieldElement::zero(n);
            for (zi, gi) in zb.iter().zip(&gens) {
                g = &g + &gi.scale(&BigRational::from_integer(zi.clone()));
            }
            if self.norm(&g).abs() == BigRational::from_integer(basis.norm.clone()) {
                found = Some(zb);
                return false;
            }
            true
        });
        found.ok_or(Error::GeneratorNotFound)
    }
}
