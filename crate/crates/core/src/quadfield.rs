//! Class groups of imaginary quadratic fields Q(√−D), −D an odd fundamental
//! discriminant, realized by reduced binary quadratic forms under Gauss
//! composition.
//!
//! Forms and ideal classes are matched once and for all through the
//! dictionary (a, b, c) ↔ the ideal with Z-basis a, (−b + √−D)/2.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{self, root_of_unity, CyclotomicValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FundamentalDiscriminant(u64);

impl FundamentalDiscriminant {
    pub fn new(d: u64) -> Result<Self> {
        validate_discriminant(d)
    }

    /// D, where the discriminant itself is −D.
    pub fn get(self) -> u64 {
        self.0
    }

    pub fn is_prime(self) -> bool {
        exactmath::is_prime(self.0)
    }
}

impl fmt::Display for FundamentalDiscriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "-{}", self.0)
    }
}

/// Accepts exactly the D with −D an odd fundamental discriminant:
/// D ≡ 3 (mod 4) and squarefree.
pub fn validate_discriminant(d: u64) -> Result<FundamentalDiscriminant> {
    if d % 4 == 3 && exactmath::is_squarefree(d) {
        Ok(FundamentalDiscriminant(d))
    } else {
        Err(Error::NotFundamental(d))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReducedForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl ReducedForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        a > 0 && b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    /// Reduce an arbitrary positive definite form to the unique reduced
    /// representative of its SL2(Z) class.
    pub fn reduce(a: i64, b: i64, c: i64) -> ReducedForm {
        let (mut a, mut b, mut c) = (a as i128, b as i128, c as i128);
        debug_assert!(a > 0 && c > 0);
        let normalize = |a: i128, b: i128, c: i128| {
            let r = (a - b).div_euclid(2 * a);
            (a, b + 2 * r * a, a * r * r + b * r + c)
        };
        (a, b, c) = normalize(a, b, c);
        while a > c {
            (a, b, c) = normalize(c, -b, a);
        }
        if a == c && b < 0 {
            b = -b;
        }
        ReducedForm { a: a as i64, b: b as i64, c: c as i64 }
    }

    pub fn inverse(&self) -> ReducedForm {
        ReducedForm::reduce(self.a, -self.b, self.c)
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }
}

impl fmt::Display for ReducedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// Dirichlet composition followed by reduction.
pub fn compose(f: &ReducedForm, g: &ReducedForm) -> Result<ReducedForm> {
    let disc = f.discriminant();
    if disc != g.discriminant() {
        return Err(Error::DiscriminantMismatch);
    }
    let (f1, f2) = if f.a > g.a { (g, f) } else { (f, g) };
    let (a1, b1) = (f1.a as i128, f1.b as i128);
    let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (d, y1) = if a2 % a1 == 0 {
        (a1, 0)
    } else {
        let (d, u, _) = exactmath::ext_gcd(a2 as i64, a1 as i64);
        (d as i128, u as i128)
    };
    let (d1, x2, y2) = if s % d == 0 {
        (d, 0, -1)
    } else {
        let (d1, x2, y2) = exactmath::ext_gcd(s as i64, d as i64);
        (d1 as i128, x2 as i128, -(y2 as i128))
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let c3 = (b3 * b3 - disc as i128) / (4 * a3);
    debug_assert_eq!(b3 * b3 - 4 * a3 * c3, disc as i128);
    Ok(ReducedForm::reduce(a3 as i64, b3 as i64, c3 as i64))
}

/// All reduced forms of discriminant −D, principal form first.
pub fn reduced_forms(d: FundamentalDiscriminant) -> Vec<ReducedForm> {
    let d = d.get() as i64;
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= d {
        for b in (-a + 1)..=a {
            if (b - d).rem_euclid(2) != 0 || (b * b + d) % (4 * a) != 0 {
                continue;
            }
            let f = ReducedForm { a, b, c: (b * b + d) / (4 * a) };
            if f.is_reduced() {
                out.push(f);
            }
        }
        a += 1;
    }
    out.sort_by_key(|f| (f.a, f.b.abs(), f.b < 0, f.c));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
}

pub fn splitting_type(d: FundamentalDiscriminant, p: u64) -> SplittingType {
    match exactmath::kronecker_prime(-(d.get() as i64), p) {
        0 => SplittingType::Ramified,
        1 => SplittingType::Split,
        _ => SplittingType::Inert,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroup {
    discriminant: FundamentalDiscriminant,
    elements: Vec<ReducedForm>,
    composition_table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
    h: u64,
    u: u64,
    exponent: u64,
}

impl ClassGroup {
    pub fn new(d: FundamentalDiscriminant) -> Self {
        let elements = reduced_forms(d);
        let h = elements.len();
        let index = |f: &ReducedForm| elements.iter().position(|g| g == f).expect("reduced form missing from list");
        let composition_table: Vec<Vec<usize>> = (0..h)
            .map(|i| (0..h).map(|j| index(&compose(&elements[i], &elements[j]).unwrap())).collect())
            .collect();
        let inverses = elements.iter().map(|f| index(&f.inverse())).collect();
        let u = if d.get() == 3 { 3 } else { 1 };
        let mut g = ClassGroup { discriminant: d, elements, composition_table, inverses, h: h as u64, u, exponent: 1 };
        g.exponent = (0..h).map(|i| g.element_order(i)).fold(1, num_integer::lcm);
        g
    }

    pub fn discriminant(&self) -> FundamentalDiscriminant {
        self.discriminant
    }

    /// D as an integer.
    pub fn d(&self) -> u64 {
        self.discriminant.get()
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    /// |O_K^×/{±1}|.
    pub fn u(&self) -> u64 {
        self.u
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn elements(&self) -> &[ReducedForm] {
        &self.elements
    }

    pub fn form(&self, idx: usize) -> &ReducedForm {
        &self.elements[idx]
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn op(&self, i: usize, j: usize) -> usize {
        self.composition_table[i][j]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverses[i]
    }

    pub fn power(&self, i: usize, n: u64) -> usize {
        (0..n).fold(self.identity(), |acc, _| self.op(acc, i))
    }

    pub fn element_order(&self, i: usize) -> u64 {
        let mut x = i;
        let mut n = 1;
        while x != self.identity() {
            x = self.op(x, i);
            n += 1;
        }
        n
    }

    pub fn index_of(&self, f: &ReducedForm) -> Option<usize> {
        self.elements.iter().position(|g| g == f)
    }

    pub fn composition_table(&self) -> &[Vec<usize>] {
        &self.composition_table
    }

    /// Class of a prime ideal above p (p split or ramified), as the class of
    /// the form (p, b, c) with b² ≡ −D (mod 4p). The conjugate prime lies in
    /// the inverse class. `None` when p is inert.
    pub fn prime_ideal_class(&self, p: u64) -> Option<usize> {
        let d = self.d() as i64;
        let p = p as i64;
        if splitting_type(self.discriminant, p as u64) == SplittingType::Inert {
            return None;
        }
        let b = (0..2 * p).find(|b| (b * b + d) % (4 * p) == 0)?;
        let f = ReducedForm::reduce(p, b, (b * b + d) / (4 * p));
        self.index_of(&f)
    }

    /// Indices of the subgroup Pic² of squares.
    pub fn square_classes(&self) -> BTreeSet<usize> {
        (0..self.h as usize).map(|i| self.op(i, i)).collect()
    }

    /// All characters of the group, trivial first, with values in μ_e for
    /// e the group exponent.
    pub fn characters(&self) -> Vec<ClassCharacter> {
        let h = self.h as usize;
        let e = self.exponent;
        // Greedy generating set.
        let mut gens: Vec<usize> = Vec::new();
        let mut span: BTreeSet<usize> = [self.identity()].into();
        for i in 0..h {
            if !span.contains(&i) {
                gens.push(i);
                span = self.closure(&gens);
            }
        }
        let mut out = Vec::new();
        let total = (e as usize).pow(gens.len() as u32);
        for code in 0..total {
            let mut images = Vec::with_capacity(gens.len());
            let mut c = code;
            for _ in &gens {
                images.push((c % e as usize) as u64);
                c /= e as usize;
            }
            if let Some(exps) = self.extend_character(&gens, &images) {
                out.push(ClassCharacter { order: e, exponents: exps });
            }
        }
        out.sort_by(|a, b| a.exponents.cmp(&b.exponents));
        debug_assert_eq!(out.len(), h);
        debug_assert!(out[0].is_trivial());
        out
    }

    pub fn trivial_character(&self) -> ClassCharacter {
        ClassCharacter { order: self.exponent, exponents: vec![0; self.h as usize] }
    }

    fn closure(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut seen: BTreeSet<usize> = [self.identity()].into();
        let mut stack = vec![self.identity()];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.op(x, g);
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    fn extend_character(&self, gens: &[usize], images: &[u64]) -> Option<Vec<u64>> {
        let e = self.exponent;
        let mut exps: Vec<Option<u64>> = vec![None; self.h as usize];
        exps[self.identity()] = Some(0);
        let mut stack = vec![self.identity()];
        while let Some(x) = stack.pop() {
            let ex = exps[x].unwrap();
            for (&g, &im) in gens.iter().zip(images) {
                let y = self.op(x, g);
                let ey = (ex + im) % e;
                match exps[y] {
                    None => {
                        exps[y] = Some(ey);
                        stack.push(y);
                    }
                    Some(v) if v != ey => return None,
                    _ => {}
                }
            }
        }
        exps.into_iter().collect()
    }
}

/// A character Ψ of the class group, Ψ(A) = ζ_e^{exponents[A]}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassCharacter {
    order: u64,
    exponents: Vec<u64>,
}

impl ClassCharacter {
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn value(&self, class: usize) -> CyclotomicValue {
        root_of_unity(self.order, self.exponents[class])
    }

    pub fn values(&self) -> Vec<CyclotomicValue> {
        (0..self.exponents.len()).map(|a| self.value(a)).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&x| x == 0)
    }

    /// Ψ takes only the values ±1.
    pub fn is_real(&self) -> bool {
        self.exponents.iter().all(|&x| (2 * x) % self.order == 0)
    }

    pub fn conj(&self) -> ClassCharacter {
        ClassCharacter {
            order: self.order,
            exponents: self.exponents.iter().map(|&x| (self.order - x) % self.order).collect(),
        }
    }
}

pub fn class_group(d: FundamentalDiscriminant) -> ClassGroup {
    ClassGroup::new(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(d: u64) -> ClassGroup {
        ClassGroup::new(validate_discriminant(d).unwrap())
    }

    fn f(a: i64, b: i64, c: i64) -> ReducedForm {
        ReducedForm { a, b, c }
    }

    /// Independent count: every (a, b, c) with b² − 4ac = −D that is reduced,
    /// scanning a box without the 3a² ≤ D shortcut.
    fn brute_force_h(d: i64) -> usize {
        let mut n = 0;
        for a in 1..=d {
            for b in -a..=a {
                for c in a..=d {
                    let g = f(a, b, c);
                    if b * b - 4 * a * c == -d && g.is_reduced() {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    #[test]
    fn discriminant_validation() {
        assert!(validate_discriminant(3).is_ok());
        assert_eq!(validate_discriminant(8), Err(Error::NotFundamental(8)));
        assert_eq!(validate_discriminant(9), Err(Error::NotFundamental(9)));
        assert_eq!(validate_discriminant(27), Err(Error::NotFundamental(27)));
        assert!(validate_discriminant(5).is_err());
        assert!(validate_discriminant(15).is_ok());
    }

    #[test]
    fn small_class_groups() {
        let g3 = grp(3);
        assert_eq!((g3.h(), g3.u()), (1, 3));
        let g23 = grp(23);
        assert_eq!(g23.h(), 3);
        assert_eq!(g23.elements(), &[f(1, 1, 6), f(2, 1, 3), f(2, -1, 3)]);
        assert_eq!(g23.exponent(), 3);
        let g15 = grp(15);
        assert_eq!(g15.elements(), &[f(1, 1, 4), f(2, 1, 2)]);
        assert_eq!(g15.u(), 1);
    }

    #[test]
    fn class_numbers_match_brute_force() {
        for d in (3..400).filter(|d| validate_discriminant(*d).is_ok()) {
            assert_eq!(grp(d).h() as usize, brute_force_h(d as i64), "D={d}");
        }
    }

    #[test]
    fn composition_examples() {
        assert_eq!(compose(&f(1, 1, 6), &f(2, 1, 3)).unwrap(), f(2, 1, 3));
        assert_eq!(compose(&f(2, 1, 3), &f(2, -1, 3)).unwrap(), f(1, 1, 6));
        let sq = compose(&f(2, 1, 3), &f(2, 1, 3)).unwrap();
        assert_eq!(compose(&sq, &f(2, 1, 3)).unwrap(), f(1, 1, 6));
        assert_eq!(compose(&f(1, 1, 6), &f(1, 1, 4)), Err(Error::DiscriminantMismatch));
    }

    #[test]
    fn group_axioms() {
        for d in (3..200).filter(|d| validate_discriminant(*d).is_ok()) {
            let g = grp(d);
            let h = g.h() as usize;
            for a in 0..h {
                assert_eq!(g.op(g.identity(), a), a);
                assert_eq!(g.op(a, g.inverse(a)), g.identity());
                for b in 0..h {
                    assert_eq!(g.op(a, b), g.op(b, a));
                    for c in 0..h {
                        assert_eq!(g.op(g.op(a, b), c), g.op(a, g.op(b, c)), "D={d}");
                    }
                }
            }
            assert_eq!(g.h() % g.exponent(), 0);
        }
    }

    #[test]
    fn composition_multiplies_coprime_leading_coefficients() {
        // (a1,b1,c1)∘(a2,b2,c2) with gcd(a1,a2)=1 represents a1·a2.
        let g = grp(479);
        for x in g.elements() {
            for y in g.elements() {
                if exactmath::gcd(x.a, y.a) != 1 {
                    continue;
                }
                let z = compose(x, y).unwrap();
                let target = x.a * y.a;
                let bound = 4 * target;
                let hit = (-bound..=bound).any(|s| (-bound..=bound).any(|t| z.eval(s, t) == target));
                assert!(hit, "{x}∘{y}={z} fails to represent {target}");
            }
        }
    }

    #[test]
    fn splitting() {
        let d3 = validate_discriminant(3).unwrap();
        assert_eq!(splitting_type(d3, 5), SplittingType::Inert);
        assert_eq!(splitting_type(d3, 3), SplittingType::Ramified);
        assert_eq!(splitting_type(d3, 7), SplittingType::Split);
        assert_eq!(splitting_type(validate_discriminant(23).unwrap(), 2), SplittingType::Split);
    }

    #[test]
    fn character_groups() {
        let cs = grp(3).characters();
        assert_eq!(cs.len(), 1);
        assert!(cs[0].is_trivial());

        let cs = grp(15).characters();
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(ClassCharacter::is_real));
        assert_eq!(cs[1].value(1).as_rational(), Some(exactmath::int(-1)));

        let g = grp(23);
        let cs = g.characters();
        assert_eq!(cs.len(), 3);
        assert!(cs[0].is_trivial());
        assert!(!cs[1].is_real() && !cs[2].is_real());
        assert_eq!(cs[1].conj(), cs[2]);
        for c in &cs {
            assert_eq!(c.value(1).pow(3), CyclotomicValue::one(3));
        }
    }

    #[test]
    fn characters_are_multiplicative_and_orthogonal() {
        for d in [15u64, 23, 39, 47, 55, 87, 95, 231] {
            let g = grp(d);
            let h = g.h() as usize;
            let cs = g.characters();
            assert_eq!(cs.len(), h);
            for c in &cs {
                for a in 0..h {
                    for b in 0..h {
                        assert_eq!(c.value(g.op(a, b)), &c.value(a) * &c.value(b));
                    }
                }
                let s: CyclotomicValue = c.values().into_iter().sum();
                if c.is_trivial() {
                    assert_eq!(s.as_rational(), Some(exactmath::int(h as i64)));
                } else {
                    assert!(s.is_zero(), "D={d}");
                }
                assert!(cs.contains(&c.conj()));
            }
        }
    }

    #[test]
    fn squares() {
        assert_eq!(grp(23).square_classes().len(), 3);
        assert_eq!(grp(15).square_classes(), [0].into());
        assert_eq!(grp(3).square_classes(), [0].into());
    }

    #[test]
    fn prime_classes() {
        let g = grp(23);
        let c2 = g.prime_ideal_class(2).unwrap();
        assert_ne!(c2, g.identity());
        assert_eq!(g.prime_ideal_class(5), None);
        // (√−23) is principal
        assert_eq!(g.prime_ideal_class(23), Some(g.identity()));
    }
}
