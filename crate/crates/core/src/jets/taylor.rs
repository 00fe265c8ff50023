//! Truncated multivariate Taylor series with complex coefficients.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num::complex::Complex64;
use num::Zero;

/// Maximum number of variables (two holomorphic and two antiholomorphic).
pub const MAX_VARS: usize = 4;

pub type Exponents = [u8; MAX_VARS];

/// Monomials in `nvars` variables of total degree at most `max_order`,
/// sorted by degree, with multiplication and differentiation tables.
#[derive(Debug)]
pub struct MonomialSpace {
    nvars: usize,
    max_order: usize,
    monos: Vec<Exponents>,
    degree: Vec<usize>,
    /// `upto[k]`: number of monomials of degree at most `k`.
    upto: Vec<usize>,
    index: HashMap<Exponents, usize>,
    /// `mul[i * len + j]`: index of `m_i * m_j`, or `u32::MAX` past `max_order`.
    mul: Vec<u32>,
    /// `raise[v][i]`: index of `m_i * x_v`, or `u32::MAX`.
    raise: Vec<Vec<u32>>,
}

impl MonomialSpace {
    /// Shared space for the given shape.
    pub fn get(nvars: usize, max_order: usize) -> Arc<MonomialSpace> {
        type Spaces = Mutex<HashMap<(usize, usize), Arc<MonomialSpace>>>;
        static SPACES: OnceLock<Spaces> = OnceLock::new();
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        let map = SPACES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = map.lock().expect("poisoned");
        guard
            .entry((nvars, max_order))
            .or_insert_with(|| Arc::new(MonomialSpace::build(nvars, max_order)))
            .clone()
    }

    fn build(nvars: usize, max_order: usize) -> Self {
        let mut monos: Vec<Exponents> = Vec::new();
        for d in 0..=max_order {
            let mut cur = [0u8; MAX_VARS];
            push_degree(nvars, 0, d, &mut cur, &mut monos);
        }
        let degree: Vec<usize> = monos.iter().map(|m| m.iter().map(|&x| x as usize).sum()).collect();
        let mut upto = vec![0; max_order + 1];
        for &d in &degree {
            for u in upto.iter_mut().skip(d) {
                *u += 1;
            }
        }
        let index: HashMap<Exponents, usize> = monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let len = monos.len();
        let mut mul = vec![u32::MAX; len * len];
        for i in 0..len {
            for j in 0..len {
                if degree[i] + degree[j] <= max_order {
                    let mut s = [0u8; MAX_VARS];
                    for v in 0..MAX_VARS {
                        s[v] = monos[i][v] + monos[j][v];
                    }
                    mul[i * len + j] = index[&s] as u32;
                }
            }
        }
        let raise = (0..nvars)
            .map(|v| {
                monos
                    .iter()
                    .map(|m| {
                        let mut s = *m;
                        s[v] += 1;
                        index.get(&s).map_or(u32::MAX, |&x| x as u32)
                    })
                    .collect()
            })
            .collect();
        MonomialSpace {
            nvars,
            max_order,
            monos,
            degree,
            upto,
            index,
            mul,
            raise,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    fn len_for(&self, order: i32) -> usize {
        if order < 0 {
            0
        } else {
            self.upto[(order as usize).min(self.max_order)]
        }
    }
}

fn push_degree(nvars: usize, v: usize, left: usize, cur: &mut Exponents, out: &mut Vec<Exponents>) {
    if v + 1 == nvars {
        cur[v] = left as u8;
        out.push(*cur);
        cur[v] = 0;
        return;
    }
    for x in (0..=left).rev() {
        cur[v] = x as u8;
        push_degree(nvars, v + 1, left - x, cur, out);
    }
    cur[v] = 0;
}

/// A Taylor polynomial about a base point, known up to total degree `order`.
/// A negative order means nothing is known.
#[derive(Clone)]
pub struct TaylorJet {
    space: Arc<MonomialSpace>,
    order: i32,
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for TaylorJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TaylorJet")
            .field("order", &self.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl TaylorJet {
    pub fn constant(space: &Arc<MonomialSpace>, order: i32, value: Complex64) -> Self {
        let mut j = Self::zero(space, order);
        if !j.coeffs.is_empty() {
            j.coeffs[0] = value;
        }
        j
    }

    pub fn zero(space: &Arc<MonomialSpace>, order: i32) -> Self {
        let order = order.min(space.max_order as i32);
        TaylorJet {
            space: space.clone(),
            order,
            coeffs: vec![Complex64::zero(); space.len_for(order)],
        }
    }

    /// `value + x_var`.
    pub fn variable(space: &Arc<MonomialSpace>, order: i32, var: usize, value: Complex64) -> Self {
        let mut j = Self::constant(space, order, value);
        let mut e = [0u8; MAX_VARS];
        e[var] = 1;
        if order >= 1 {
            let i = space.index[&e];
            j.coeffs[i] = Complex64::new(1.0, 0.0);
        }
        j
    }

    pub fn space(&self) -> &Arc<MonomialSpace> {
        &self.space
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    /// Value at the base point, `None` when nothing is known.
    pub fn value(&self) -> Option<Complex64> {
        self.coeffs.first().copied()
    }

    /// Taylor coefficient of a monomial (zero past the order).
    pub fn coeff(&self, e: &Exponents) -> Complex64 {
        self.space
            .index
            .get(e)
            .and_then(|&i| self.coeffs.get(i))
            .copied()
            .unwrap_or_else(Complex64::zero)
    }

    /// Partial derivative `∂^e` evaluated at the base point.
    pub fn derivative_value(&self, e: &Exponents) -> Option<Complex64> {
        let d: usize = e.iter().map(|&x| x as usize).sum();
        if d as i32 > self.order {
            return None;
        }
        let f: f64 = e.iter().map(|&x| factorial(x as usize)).product();
        Some(self.coeff(e) * f)
    }

    pub fn truncate(&self, order: i32) -> Self {
        let order = order.min(self.order);
        let n = self.space.len_for(order);
        TaylorJet {
            space: self.space.clone(),
            order,
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    pub fn derivative(&self, var: usize) -> Self {
        let order = self.order - 1;
        let n = self.space.len_for(order);
        let raise = &self.space.raise[var];
        let coeffs = (0..n)
            .map(|i| {
                let r = raise[i] as usize;
                self.coeffs[r] * f64::from(self.space.monos[i][var] + 1)
            })
            .collect();
        TaylorJet {
            space: self.space.clone(),
            order,
            coeffs,
        }
    }

    /// `∂^e` as a jet.
    pub fn derivatives(&self, e: &Exponents) -> Self {
        let mut j = self.clone();
        for (v, &k) in e.iter().enumerate().take(self.space.nvars) {
            for _ in 0..k {
                j = j.derivative(v);
            }
        }
        j
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TaylorJet {
            space: self.space.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add_const(&self, c: Complex64) -> Self {
        let mut j = self.clone();
        if let Some(x) = j.coeffs.first_mut() {
            *x += c;
        }
        j
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let order = self.order.min(other.order);
        let n = self.space.len_for(order);
        TaylorJet {
            space: self.space.clone(),
            order,
            coeffs: (0..n).map(|i| f(self.coeffs[i], other.coeffs[i])).collect(),
        }
    }

    fn product(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let sp = &self.space;
        let mut out = vec![Complex64::zero(); sp.len_for(order)];
        if order >= 0 {
            let len = sp.monos.len();
            for (i, &a) in self.coeffs.iter().enumerate().take(out.len()) {
                if a.is_zero() {
                    continue;
                }
                let rest = sp.len_for(order - sp.degree[i] as i32);
                let row = &sp.mul[i * len..i * len + rest];
                for (j, &b) in other.coeffs[..rest].iter().enumerate() {
                    out[row[j] as usize] += a * b;
                }
            }
        }
        TaylorJet {
            space: sp.clone(),
            order,
            coeffs: out,
        }
    }

    /// `Σ c_k u^k` for `u = self - value` (nilpotent), by Horner's rule.
    fn nilpotent_series(&self, coeffs: impl Fn(usize) -> Complex64) -> Self {
        let u = self.add_const(-self.value().unwrap_or_else(Complex64::zero));
        let kmax = self.order.max(0) as usize;
        let mut acc = TaylorJet::constant(&self.space, self.order, coeffs(kmax));
        for k in (0..kmax).rev() {
            acc = (&acc * &u).add_const(coeffs(k));
        }
        acc
    }

    pub fn recip(&self) -> Self {
        let a0 = self.value().expect("reciprocal of an empty jet");
        assert!(a0.norm() > 0.0, "reciprocal of a jet vanishing at the base point");
        // 1/(a0 + u) = Σ (-1)^k u^k / a0^{k+1}
        let inv = a0.inv();
        self.nilpotent_series(|k| {
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            inv.powu(k as u32 + 1) * s
        })
    }

    pub fn ln(&self) -> Self {
        let a0 = self.value().expect("log of an empty jet");
        let inv = a0.inv();
        self.nilpotent_series(|k| {
            if k == 0 {
                a0.ln()
            } else {
                let s = if k % 2 == 1 { 1.0 } else { -1.0 };
                inv.powu(k as u32) * (s / k as f64)
            }
        })
    }

    pub fn exp(&self) -> Self {
        let a0 = self.value().expect("exp of an empty jet");
        let e0 = a0.exp();
        self.nilpotent_series(|k| e0 / factorial(k))
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = TaylorJet::constant(&self.space, self.order, Complex64::new(1.0, 0.0));
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Largest coefficient modulus, for error estimates.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl Add for &TaylorJet {
    type Output = TaylorJet;
    fn add(self, rhs: &TaylorJet) -> TaylorJet {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &TaylorJet {
    type Output = TaylorJet;
    fn sub(self, rhs: &TaylorJet) -> TaylorJet {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Mul for &TaylorJet {
    type Output = TaylorJet;
    fn mul(self, rhs: &TaylorJet) -> TaylorJet {
        self.product(rhs)
    }
}

impl Neg for &TaylorJet {
    type Output = TaylorJet;
    fn neg(self) -> TaylorJet {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

/// Inverse of a square matrix of jets by Gauss-Jordan elimination.
pub fn invert_matrix(m: &[Vec<TaylorJet>]) -> Option<Vec<Vec<TaylorJet>>> {
    let n = m.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let sp = m[0][0].space().clone();
    let order = m.iter().flatten().map(TaylorJet::order).min().unwrap_or(0);
    let mut a: Vec<Vec<TaylorJet>> = m.to_vec();
    let mut inv: Vec<Vec<TaylorJet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = if i == j { 1.0 } else { 0.0 };
                    TaylorJet::constant(&sp, order, Complex64::new(v, 0.0))
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| {
            let vx = a[x][col].value().map_or(0.0, |c| c.norm());
            let vy = a[y][col].value().map_or(0.0, |c| c.norm());
            vx.total_cmp(&vy)
        })?;
        if a[piv][col].value().map_or(0.0, |c| c.norm()) < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let r = a[col][col].recip();
        for j in 0..n {
            a[col][j] = &a[col][j] * &r;
            inv[col][j] = &inv[col][j] * &r;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = a[i][col].clone();
            for j in 0..n {
                a[i][j] = &a[i][j] - &(&f * &a[col][j]);
                inv[i][j] = &inv[i][j] - &(&f * &inv[col][j]);
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_jet(sp: &Arc<MonomialSpace>, order: i32, rng: &mut ChaCha8Rng) -> TaylorJet {
        let mut j = TaylorJet::zero(sp, order);
        for c in j.coeffs.iter_mut() {
            *c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        j.coeffs[0] += Complex64::new(2.0, 0.0);
        j
    }

    #[test]
    fn space_sizes() {
        assert_eq!(MonomialSpace::get(2, 10).monos.len(), 66);
        assert_eq!(MonomialSpace::get(4, 10).monos.len(), 1001);
    }

    #[test]
    fn log_exp_and_reciprocal_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for nv in [2usize, 4] {
            let sp = MonomialSpace::get(nv, 8);
            for _ in 0..5 {
                let j = random_jet(&sp, 8, &mut rng);
                assert!(j.ln().exp().max_abs_diff(&j) < 1e-12);
                let one = &j * &j.recip();
                assert!(one.add_const(Complex64::new(-1.0, 0.0)).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn derivative_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let sp = MonomialSpace::get(2, 6);
        let a = random_jet(&sp, 6, &mut rng);
        let b = random_jet(&sp, 6, &mut rng);
        let lhs = (&a * &b).derivative(1);
        let rhs = &(&a.derivative(1) * &b) + &(&a * &b.derivative(1));
        assert_eq!(lhs.order(), 5);
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn matrix_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sp = MonomialSpace::get(4, 4);
        let m: Vec<Vec<TaylorJet>> = (0..2)
            .map(|_| (0..2).map(|_| random_jet(&sp, 4, &mut rng)).collect())
            .collect();
        let inv = invert_matrix(&m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let s = &(&m[i][0] * &inv[0][j]) + &(&m[i][1] * &inv[1][j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(s.add_const(Complex64::new(-expect, 0.0)).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn variable_powers() {
        let sp = MonomialSpace::get(2, 5);
        let x = TaylorJet::variable(&sp, 5, 0, Complex64::new(0.0, 0.0));
        let p = x.powi(3);
        assert_eq!(p.derivative_value(&[3, 0, 0, 0]), Some(Complex64::new(6.0, 0.0)));
        assert_eq!(x.powi(6).max_abs(), 0.0);
    }
}
