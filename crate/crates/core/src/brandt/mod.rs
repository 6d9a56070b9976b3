//! Brandt modules of prime level: left-ideal classes of a maximal order in
//! the definite quaternion algebra ramified at {N, ∞}, their Brandt
//! matrices, Gross points attached to an imaginary quadratic order, the
//! height pairing and the resulting central values.

mod eigen;
pub mod lattice;
pub mod quaternion;

pub use eigen::{block_central_value, central_value_ratio, eigen_split, EigenSplit, RationalEigenform, ResidualBlock};
pub use lattice::Lattice;
pub use quaternion::{maximal_order, MaximalOrder, QuaternionAlgebra};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{self, int, rat, Rational};
use crate::kernel;
use crate::quadfield::{splitting_type, ClassGroup, SplittingType};
use crate::repnum;

/// Limits for the class search and lattice enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrandtConfig {
    pub max_classes: usize,
    pub max_nodes: u64,
}

impl Default for BrandtConfig {
    fn default() -> Self {
        BrandtConfig { max_classes: 200, max_nodes: 50_000_000 }
    }
}

/// One left-ideal class: a representative ideal, its norm, its right order
/// and w = |O_r^×|/2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealClass {
    pub ideal: Lattice,
    pub norm: Rational,
    pub right_order: Lattice,
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrandtModule {
    pub n: u64,
    pub m_max: u64,
    pub order: MaximalOrder,
    pub classes: Vec<IdealClass>,
    /// B(m) for 1 ≤ m ≤ m_max, dense row-major, index m − 1.
    matrices: Vec<Vec<Vec<i64>>>,
    config: BrandtConfig,
}

/// Whether I ~ J (J = I·x for some x): some y ∈ Ī·J has nrd(y) = N(I)·N(J).
fn equivalent(alg: &QuaternionAlgebra, i: &IdealClass, j_ideal: &Lattice, j_norm: &Rational, max_nodes: u64) -> Result<bool> {
    let prod = alg.product(&alg.conj_lattice(&i.ideal), j_ideal);
    let target = &i.norm * j_norm;
    let scaled = &target * Rational::from_integer(prod.den() * prod.den());
    let scaled = lattice::to_i128(&scaled.to_integer())?;
    let mut found = false;
    alg.short_elements(&prod, &target, max_nodes, |_, v| found |= v == scaled)?;
    Ok(found)
}

fn unit_weight(alg: &QuaternionAlgebra, order: &Lattice, max_nodes: u64) -> Result<u64> {
    let one = order.den() * order.den();
    let one = lattice::to_i128(&one)?;
    let mut units = 0u64;
    alg.short_elements(order, &int(1), max_nodes, |_, v| units += u64::from(v == one))?;
    debug_assert!(units % 2 == 0);
    Ok(units / 2)
}

impl BrandtModule {
    pub fn build(n: u64, m_max: u64) -> Result<Self> {
        Self::build_with(n, m_max, BrandtConfig::default())
    }

    pub fn build_with(n: u64, m_max: u64, config: BrandtConfig) -> Result<Self> {
        let order = maximal_order(n)?;
        let alg = order.algebra;
        let mut classes = vec![IdealClass {
            ideal: order.lattice.clone(),
            norm: int(1),
            right_order: order.lattice.clone(),
            weight: unit_weight(&alg, &order.lattice, config.max_nodes)?,
        }];
        // Breadth-first search over 2-neighbours until closure.
        let mut next = 0;
        while next < classes.len() {
            let cur = classes[next].clone();
            next += 1;
            for l in quaternion::left_ideals_of_prime_norm(&alg, &cur.right_order, 2) {
                let ideal = alg.product(&cur.ideal, &l);
                let norm = &cur.norm * int(2);
                let mut known = false;
                for c in &classes {
                    if equivalent(&alg, c, &ideal, &norm, config.max_nodes)? {
                        known = true;
                        break;
                    }
                }
                if known {
                    continue;
                }
                if classes.len() >= config.max_classes {
                    return Err(Error::EnumerationBound(format!("more than {} ideal classes", config.max_classes)));
                }
                let right_order = quaternion::right_order(&alg, &ideal, &norm);
                let weight = unit_weight(&alg, &right_order, config.max_nodes)?;
                classes.push(IdealClass { ideal, norm, right_order, weight });
            }
        }
        let mass: Rational = classes.iter().map(|c| rat(1, c.weight as i64)).sum();
        assert_eq!(mass, rat(n as i64 - 1, 12), "Eichler mass formula fails for N = {n}");
        let mut module = BrandtModule { n, m_max, order, classes, matrices: Vec::new(), config };
        module.matrices = module.compute_matrices()?;
        Ok(module)
    }

    fn compute_matrices(&self) -> Result<Vec<Vec<Vec<i64>>>> {
        let h = self.classes.len();
        let alg = &self.order.algebra;
        let mut out = vec![vec![vec![0i64; h]; h]; self.m_max as usize];
        for i in 0..h {
            for j in 0..h {
                let (ci, cj) = (&self.classes[i], &self.classes[j]);
                let lat = alg.product(&alg.conj_lattice(&cj.ideal), &ci.ideal);
                let unit = &ci.norm * &cj.norm * Rational::from_integer(lat.den() * lat.den());
                let unit = lattice::to_i128(&unit.to_integer())?;
                let mut counts = vec![0u64; self.m_max as usize + 1];
                alg.short_elements(&lat, &(&ci.norm * &cj.norm * int(self.m_max as i64)), self.config.max_nodes, |_, v| {
                    assert_eq!(v % unit, 0, "norm not a multiple of N(I_i)N(I_j)");
                    counts[(v / unit) as usize] += 1;
                })?;
                for m in 1..=self.m_max as usize {
                    let units = 2 * cj.weight;
                    assert_eq!(counts[m] % units, 0, "Brandt count not divisible by unit group order");
                    out[m - 1][i][j] = (counts[m] / units) as i64;
                }
            }
        }
        Ok(out)
    }

    pub fn dimension(&self) -> usize {
        self.classes.len()
    }

    pub fn weights(&self) -> Vec<u64> {
        self.classes.iter().map(|c| c.weight).collect()
    }

    pub fn mass(&self) -> Rational {
        self.classes.iter().map(|c| rat(1, c.weight as i64)).sum()
    }

    /// B(m) as an integer matrix, 1 ≤ m ≤ m_max.
    pub fn matrix(&self, m: u64) -> &[Vec<i64>] {
        assert!((1..=self.m_max).contains(&m), "B({m}) not cached (m_max = {})", self.m_max);
        &self.matrices[m as usize - 1]
    }

    pub fn rat_matrix(&self, m: u64) -> exactmath::matrix::RatMatrix {
        let b = self.matrix(m);
        exactmath::matrix::RatMatrix::from_fn(b.len(), b.len(), |i, j| int(b[i][j]))
    }

    /// The Hecke operator T_m on coordinate vectors: x ↦ B(m)ᵀx.
    pub fn hecke(&self, m: u64, x: &[Rational]) -> Vec<Rational> {
        let b = self.matrix(m);
        (0..b.len()).map(|j| (0..b.len()).fold(Rational::zero(), |acc, i| acc + int(b[i][j]) * &x[i])).collect()
    }

    /// The Eisenstein direction e = (1/w_j).
    pub fn eisenstein_vector(&self) -> Vec<Rational> {
        self.classes.iter().map(|c| rat(1, c.weight as i64)).collect()
    }
}

/// Construct the module for an odd prime N with Brandt matrices up to m_max.
pub fn build_module(n: u64, m_max: u64) -> Result<BrandtModule> {
    BrandtModule::build(n, m_max)
}

/// ⟨x, y⟩ = Σ w_j x_j y_j.
pub fn height_pairing(module: &BrandtModule, x: &[Rational], y: &[Rational]) -> Result<Rational> {
    let h = module.dimension();
    for v in [x, y] {
        if v.len() != h {
            return Err(Error::DimensionMismatch { expected: h, got: v.len() });
        }
    }
    Ok(module.classes.iter().zip(x.iter().zip(y)).map(|(c, (a, b))| int(c.weight as i64) * a * b).sum())
}

/// Gross points: c_j = number of optimal embeddings of O_K into O_r(I_j)
/// modulo conjugation by O_r(I_j)^×, one orientation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrossPointVector {
    pub d: u64,
    pub components: Vec<u64>,
}

impl GrossPointVector {
    pub fn as_rational(&self) -> Vec<Rational> {
        self.components.iter().map(|&c| int(c as i64)).collect()
    }
}

pub fn gross_points(module: &BrandtModule, g: &ClassGroup) -> Result<GrossPointVector> {
    let d = g.d();
    if splitting_type(g.discriminant(), module.n) != SplittingType::Inert || d % module.n == 0 {
        return Err(Error::PreconditionViolated(format!("N = {} must be inert in Q(sqrt(-{d}))", module.n)));
    }
    let alg = &module.order.algebra;
    let target_norm = rat((1 + d) as i64, 4);
    let mut components = Vec::with_capacity(module.dimension());
    for class in &module.classes {
        let r = &class.right_order;
        let den = r.den();
        let scaled = lattice::to_i128(&(&target_norm * Rational::from_integer(den * den)).to_integer())?;
        let mut roots = 0u64;
        alg.short_elements(r, &target_norm, module.config.max_nodes, |v, val| {
            // trd = 2·x0/den
            if val == scaled && Rational::new(BigInt::from(2) * &r.element(v)[0], den.clone()) == int(1) {
                roots += 1;
            }
        })?;
        let num = roots * g.u();
        let den = 2 * class.weight;
        assert_eq!(num % den, 0, "embedding count {roots} not divisible by 2w/u");
        components.push(num / den);
    }
    let total: u64 = components.iter().sum();
    assert_eq!(total, g.h(), "Gross points do not sum to h");
    Ok(GrossPointVector { d, components })
}

/// ⟨c, T_m c⟩ from quaternion arithmetic against the class-group expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AverageComparison {
    pub d: u64,
    pub n: u64,
    pub m: u64,
    pub left: Rational,
    pub right: Rational,
    pub matches: bool,
    /// LEFT − 12h²σ_N(m)/(N−1).
    pub cusp: Rational,
}

pub fn verify_average(module: &BrandtModule, g: &ClassGroup, m: u64) -> Result<AverageComparison> {
    let n = module.n;
    if m < 1 || m % n == 0 {
        return Err(Error::InvalidParameters(format!("m = {m} must be positive and prime to N = {n}")));
    }
    let c = gross_points(module, g)?.as_rational();
    let left = height_pairing(module, &c, &module.hecke(m, &c))?;

    let (h, u, d) = (g.h() as i64, g.u() as i64, g.d());
    let aux = kernel::auxiliary_prime(g, n, m)?;
    let mut phi = Rational::zero();
    for nn in 1..=m * d / n {
        let delta = exactmath::num_divisors(exactmath::gcd(nn as i64, d as i64) as u64) as i64;
        for a in 0..h as usize {
            let r = repnum::r_class(g, a, m * d - nn * n);
            if r.is_zero() {
                continue;
            }
            phi += r * int(delta * kernel::r_braced(g, g.op(aux.q_class, a), nn) as i64);
        }
    }
    let right = int(u * h) * repnum::r_total(g, m) + int(u * u) * phi;
    let eis = rat(12 * h * h * repnum::sigma_n(n, m) as i64, n as i64 - 1);
    Ok(AverageComparison { d, n, m, matches: left == right, cusp: &left - eis, left, right })
}

/// Row sums of B(m) as integers, for diagnostics.
pub fn row_sums(module: &BrandtModule, m: u64) -> Vec<i64> {
    module.matrix(m).iter().map(|r| r.iter().sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::validate_discriminant;

    fn grp(d: u64) -> ClassGroup {
        ClassGroup::new(validate_discriminant(d).unwrap())
    }

    #[test]
    fn level_eleven() {
        let m = build_module(11, 6).unwrap();
        let mut w = m.weights();
        w.sort();
        assert_eq!(w, vec![2, 3]);
        assert_eq!(m.mass(), rat(5, 6));
        let b2 = m.matrix(2);
        assert_eq!(b2[0][0] + b2[1][1], 1);
        assert_eq!(m.matrix(1), &[vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn small_masses() {
        assert_eq!(build_module(13, 2).unwrap().mass(), int(1));
        let five = build_module(5, 4).unwrap();
        assert_eq!(five.dimension(), 1);
        assert_eq!(five.weights(), vec![3]);
        assert_eq!(build_module(3, 2).unwrap().weights(), vec![6]);
    }

    #[test]
    fn pairing_examples() {
        let m = build_module(11, 2).unwrap();
        let e = m.eisenstein_vector();
        assert_eq!(height_pairing(&m, &e, &e).unwrap(), rat(5, 6));
        assert!(matches!(height_pairing(&m, &e, &[int(1)]), Err(Error::DimensionMismatch { expected: 2, got: 1 })));
        let g = grp(3);
        let c = gross_points(&m, &g).unwrap();
        let idx3 = m.weights().iter().position(|&w| w == 3).unwrap();
        assert_eq!(c.components[idx3], 1);
        assert_eq!(c.components[1 - idx3], 0);
        let cv = c.as_rational();
        assert_eq!(height_pairing(&m, &cv, &cv).unwrap(), int(3));
        assert_eq!(height_pairing(&m, &cv, &e).unwrap(), int(1));
    }

    #[test]
    fn gross_point_examples() {
        let five = build_module(5, 4).unwrap();
        assert_eq!(gross_points(&five, &grp(3)).unwrap().components, vec![1]);
        let thirteen = build_module(13, 2).unwrap();
        assert_eq!(gross_points(&thirteen, &grp(11)).unwrap().components.iter().sum::<u64>(), 1);
        assert!(matches!(gross_points(&thirteen, &grp(3)), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn verify_average_examples() {
        let m = build_module(11, 4).unwrap();
        let g = grp(3);
        let v1 = verify_average(&m, &g, 1).unwrap();
        assert_eq!((v1.left.clone(), v1.right.clone()), (int(3), int(3)));
        let v2 = verify_average(&m, &g, 2).unwrap();
        assert!(v2.matches);
        assert_eq!(v2.left, int(0));
        let m13 = build_module(13, 2).unwrap();
        let v = verify_average(&m13, &grp(7), 1).unwrap();
        assert_eq!((v.left, v.right), (int(1), int(1)));
        let five = build_module(5, 4).unwrap();
        for (mm, left) in [(2u64, 9i64), (3, 12), (4, 21)] {
            let v = verify_average(&five, &g, mm).unwrap();
            assert!(v.matches);
            assert_eq!(v.left, int(left));
        }
        assert!(verify_average(&m, &g, 11).is_err());
    }

    #[test]
    fn enumeration_bound_reported() {
        let cfg = BrandtConfig { max_classes: 2, max_nodes: 50_000_000 };
        assert!(matches!(BrandtModule::build_with(61, 2, cfg), Err(Error::EnumerationBound(_))));
        let cfg = BrandtConfig { max_classes: 200, max_nodes: 5 };
        assert!(matches!(BrandtModule::build_with(11, 2, cfg), Err(Error::EnumerationBound(_))));
    }
}
