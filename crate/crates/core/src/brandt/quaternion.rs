//! Definite quaternion algebras (a, b) over Q, maximal orders of prime
//! discriminant and left ideals.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::lattice::{self, Lattice, Vec4};
use crate::error::{Error, Result};
use crate::exactmath::{self, Rational};

/// The algebra with i² = a, j² = b, k = ij; definite when a, b < 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuaternionAlgebra {
    pub a: i64,
    pub b: i64,
}

impl QuaternionAlgebra {
    /// Product of coordinate vectors in the basis 1, i, j, k.
    pub fn mul(&self, x: &Vec4, y: &Vec4) -> Vec4 {
        let (a, b) = (BigInt::from(self.a), BigInt::from(self.b));
        let ab = &a * &b;
        [
            &x[0] * &y[0] + &a * &x[1] * &y[1] + &b * &x[2] * &y[2] - &ab * &x[3] * &y[3],
            &x[0] * &y[1] + &x[1] * &y[0] - &b * &x[2] * &y[3] + &b * &x[3] * &y[2],
            &x[0] * &y[2] + &x[2] * &y[0] + &a * &x[1] * &y[3] - &a * &x[3] * &y[1],
            &x[0] * &y[3] + &x[3] * &y[0] + &x[1] * &y[2] - &x[2] * &y[1],
        ]
    }

    pub fn conj(&self, x: &Vec4) -> Vec4 {
        [x[0].clone(), -&x[1], -&x[2], -&x[3]]
    }

    /// Reduced norm of a coordinate vector.
    pub fn nrd(&self, x: &Vec4) -> BigInt {
        let (a, b) = (BigInt::from(self.a), BigInt::from(self.b));
        &x[0] * &x[0] - &a * &x[1] * &x[1] - &b * &x[2] * &x[2] + &a * &b * &x[3] * &x[3]
    }

    /// Diagonal of the norm form in the basis 1, i, j, k.
    pub fn norm_diagonal(&self) -> [i64; 4] {
        [1, -self.a, -self.b, self.a * self.b]
    }

    /// Lattice spanned by all products x·y, x ∈ l, y ∈ r.
    pub fn product(&self, l: &Lattice, r: &Lattice) -> Lattice {
        let mut rows = Vec::with_capacity(16);
        for x in l.basis() {
            for y in r.basis() {
                rows.push(self.mul(x, y));
            }
        }
        Lattice::new(l.den() * r.den(), rows)
    }

    pub fn conj_lattice(&self, l: &Lattice) -> Lattice {
        Lattice::new(l.den().clone(), l.basis().iter().map(|x| self.conj(x)).collect())
    }

    /// Integral Gram matrix G with v·G·vᵀ = den²·nrd(Σ v_a basis_a).
    pub fn gram(&self, l: &Lattice) -> Result<[[i128; 4]; 4]> {
        let diag = self.norm_diagonal();
        let rows = l.basis();
        let mut g = [[0i128; 4]; 4];
        for i in 0..4 {
            for j in i..4 {
                let v: BigInt = (0..4).map(|t| BigInt::from(diag[t]) * &rows[i][t] * &rows[j][t]).sum();
                g[i][j] = lattice::to_i128(&v)?;
                g[j][i] = g[i][j];
            }
        }
        Ok(g)
    }

    /// Every nonzero x ∈ l with nrd(x) ≤ bound, passed as (basis coordinates,
    /// nrd(x)·den²).
    pub fn short_elements(
        &self,
        l: &Lattice,
        bound: &Rational,
        max_nodes: u64,
        visit: impl FnMut(&[i128; 4], i128),
    ) -> Result<()> {
        let g = self.gram(l)?;
        let scaled = (bound * Rational::from_integer(l.den() * l.den())).floor();
        let scaled = lattice::to_i128(scaled.numer())?;
        lattice::enumerate(&g, scaled, max_nodes, visit)
    }
}

/// A maximal order of the definite algebra ramified at {N, ∞}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalOrder {
    pub n: u64,
    pub algebra: QuaternionAlgebra,
    pub lattice: Lattice,
}

fn rows(v: &[[i64; 4]]) -> Vec<Vec4> {
    v.iter().map(|r| r.map(BigInt::from)).collect()
}

/// The classical maximal order for an odd prime N, by N mod 8.
pub fn maximal_order(n: u64) -> Result<MaximalOrder> {
    if n == 2 || !exactmath::is_prime(n) {
        return Err(Error::InvalidParameters(format!("N = {n} must be an odd prime")));
    }
    let ni = n as i64;
    let (algebra, den, basis) = if n % 4 == 3 {
        // ⟨1, i, (1+j)/2, (i+k)/2⟩ in (−1, −N)
        (QuaternionAlgebra { a: -1, b: -ni }, 2, rows(&[[2, 0, 0, 0], [0, 2, 0, 0], [1, 0, 1, 0], [0, 1, 0, 1]]))
    } else if n % 8 == 5 {
        // ⟨(1+j+k)/2, (i+2j+k)/4, j, k⟩ in (−2, −N)
        (QuaternionAlgebra { a: -2, b: -ni }, 4, rows(&[[2, 0, 2, 2], [0, 1, 2, 1], [0, 0, 4, 0], [0, 0, 0, 4]]))
    } else {
        // ⟨(1+j)/2, (i+k)/2, (j+ck)/q, k⟩ in (−N, −q), q ≡ 3 (mod 4) with (N/q) = −1, q | c²N + 1
        let q = (3..)
            .step_by(4)
            .find(|&q| exactmath::is_prime(q) && exactmath::kronecker_prime(ni, q) == -1)
            .unwrap();
        let qi = q as i64;
        let c = (0..qi).find(|c| (c * c * ni + 1) % qi == 0).expect("−1/N is a square mod q");
        (
            QuaternionAlgebra { a: -ni, b: -qi },
            2 * qi,
            rows(&[[qi, 0, qi, 0], [0, qi, 0, qi], [0, 0, 2, 2 * c], [0, 0, 0, 2 * qi]]),
        )
    };
    let order = MaximalOrder { n, algebra, lattice: Lattice::new(BigInt::from(den), basis) };
    order.verify()?;
    Ok(order)
}

impl MaximalOrder {
    /// Checks 1 ∈ O, O·O = O, integrality of trace and norm, and reduced
    /// discriminant N (|det trd(e_a ē_b)| = N²).
    pub fn verify(&self) -> Result<()> {
        let alg = &self.algebra;
        let o = &self.lattice;
        let fail = |what: &str| Err(Error::PreconditionViolated(format!("order for N = {}: {what}", self.n)));
        let one = [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
        if !o.contains(&one, &BigInt::one()) {
            return fail("missing 1");
        }
        if alg.product(o, o) != *o {
            return fail("not closed under multiplication");
        }
        let den = o.den();
        for x in o.basis() {
            if !(&x[0] * BigInt::from(2) % den).is_zero() || !(alg.nrd(x) % (den * den)).is_zero() {
                return fail("non-integral element");
            }
        }
        // trd(x ȳ) = 2·(bilinear form of nrd); det scales by 2⁴.
        let disc = o.volume() * o.volume() * Rational::from_integer(BigInt::from(16 * alg.a * alg.a * alg.b * alg.b));
        if disc != Rational::from_integer(BigInt::from(self.n * self.n)) {
            return fail("discriminant is not N");
        }
        Ok(())
    }

    pub fn volume(&self) -> Rational {
        self.lattice.volume()
    }

    /// The reduced norm N(I) of a lattice I with left order O: vol(I) = N(I)²·vol(O).
    pub fn ideal_norm(&self, ideal: &Lattice) -> Rational {
        rational_sqrt(&(ideal.volume() / self.volume())).expect("index of an ideal is a square")
    }
}

/// Exact square root of a nonnegative rational, when it exists.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| Rational::new(sn, sd))
}

/// Right order of a lattice I: Ī·I/N(I).
pub fn right_order(alg: &QuaternionAlgebra, ideal: &Lattice, norm: &Rational) -> Lattice {
    alg.product(&alg.conj_lattice(ideal), ideal).scale(&norm.recip())
}

/// The ℓ + 1 left ideals of reduced norm ℓ (prime, ℓ ∤ N) in `order`:
/// Oα + ℓO for α ∈ O with ℓ | nrd(α) and α ∉ ℓO.
pub fn left_ideals_of_prime_norm(alg: &QuaternionAlgebra, order: &Lattice, ell: u64) -> Vec<Lattice> {
    let basis = order.basis();
    let den = order.den();
    let l = ell as i64;
    let ell_big = BigInt::from(ell);
    let mut seen = std::collections::BTreeSet::new();
    let scaled_order: Vec<Vec4> = basis.iter().map(|x| x.clone().map(|t| t * &ell_big)).collect();
    for code in 1..l.pow(4) {
        let coords = [code % l, (code / l) % l, (code / (l * l)) % l, code / (l * l * l)];
        let mut alpha = [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
        for (a, &c) in coords.iter().enumerate() {
            for t in 0..4 {
                alpha[t] += BigInt::from(c) * &basis[a][t];
            }
        }
        // nrd(alpha/den) divisible by ℓ
        if !(alg.nrd(&alpha) % (den * den * &ell_big)).is_zero() {
            continue;
        }
        let mut gens: Vec<Vec4> = basis.iter().map(|x| alg.mul(x, &alpha)).collect();
        gens.extend(scaled_order.iter().map(|x| x.clone().map(|t| t * den)));
        seen.insert(Lattice::new(den * den, gens));
    }
    seen.into_iter().collect()
}
