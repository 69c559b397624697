#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wirtinger::jet::DEFAULT_POLE_FLOOR;
use wirtinger::{Complex, Error, Expr, JetCarrier, Primitive};

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Point with `lo ≤ |z| ≤ hi`, at least `margin` radians away from the
/// negative real axis.
pub fn sample_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64, margin: f64) -> Complex {
    let r = rng.gen_range(lo..hi);
    let limit = std::f64::consts::PI - margin;
    let theta = rng.gen_range(-limit..limit);
    Complex::from_polar(r, theta)
}

pub fn unit_direction(rng: &mut ChaCha8Rng) -> Complex {
    Complex::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `|a − b| / max(1, |b|)`.
pub fn rel_err(a: Complex, b: Complex) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Smooth off the origin and the negative real axis.
pub const ORACLE_CORPUS: [&str; 20] = [
    "z^2",
    "conj(z)",
    "z^3 - i*z + conj(z)^2",
    "1/z",
    "(z^2 + conj(z))^3",
    "z*conj(z)",
    "exp(z)*conj(z)",
    "sin(z)*cos(conj(z))",
    "log(z) + z^-2",
    "sqrt(z)*zc",
    "abs(z)^3",
    "arg(z)*re(z)",
    "im(z^2)/(1 + abs2(z))",
    "exp(-abs2(z))",
    "(z - 1)/(zc + 2)",
    "cos(z)^2 + sin(zc)^2",
    "log(1 + abs2(z))",
    "re(z)^3 - im(z)*z",
    "conj(exp(i*z))",
    "z^4*zc^-1 + 2.5i",
];

/// Real-valued costs.
pub const REAL_COSTS: [&str; 10] = [
    "abs2(z)",
    "z*zc",
    "abs2(z - 1 + 2i)",
    "re(z)^2 + im(z)^4",
    "abs2(exp(z))",
    "abs2(z^2 - 1)",
    "log(1 + abs2(z))",
    "re(z^3)",
    "im(z)*re(z)",
    "abs2(sin(z)) + re(z)",
];

pub fn parse(text: &str) -> Expr {
    wirtinger::parse(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn canonical_constant() -> impl Strategy<Value = Complex> {
    prop_oneof![
        (0.0f64..1e6).prop_map(|x| c(x, 0.0)),
        (0u32..100).prop_map(|k| c(f64::from(k), 0.0)),
        (1e-3f64..1e3).prop_map(|y| c(0.0, y)),
    ]
}

/// Expressions the parser can produce, up to depth 8.
pub fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Variable),
        Just(Expr::ConjVariable),
        Just(Expr::ImaginaryUnit),
        canonical_constant().prop_map(Expr::Constant),
    ];
    leaf.prop_recursive(8, 64, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), -64i32..=64).prop_map(|(a, k)| Expr::pow(a, k)),
            (inner, 0..Primitive::CALLABLE.len())
                .prop_map(|(a, k)| Expr::call(Primitive::CALLABLE[k], a)),
        ]
    })
}

/// Conjugation-free expressions built from holomorphic pieces.
pub fn arb_holomorphic() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Variable),
        Just(Expr::ImaginaryUnit),
        canonical_constant().prop_map(Expr::Constant),
    ];
    let holo = [
        Primitive::Exp,
        Primitive::Log,
        Primitive::Sin,
        Primitive::Cos,
        Primitive::Sqrt,
    ];
    leaf.prop_recursive(5, 32, 2, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), -4i32..=4).prop_map(|(a, k)| Expr::pow(a, k)),
            (inner, 0..holo.len()).prop_map(move |(a, k)| Expr::call(holo[k], a)),
        ]
    })
}

/// Value with both real partials `∂f/∂x`, `∂f/∂y`, propagated by the
/// ordinary real chain rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealJet {
    pub v: Complex,
    pub fx: Complex,
    pub fy: Complex,
}

impl RealJet {
    fn scale(&self, k: Complex) -> (Complex, Complex) {
        (self.fx * k, self.fy * k)
    }

    /// Derivative of a real-valued function `r(w)` along the inner jet,
    /// with `grad = ∂r/∂u + i ∂r/∂v` (`w = u + iv`).
    fn real_chain(&self, value: f64, grad: Complex) -> RealJet {
        let along = |d: Complex| c(grad.re * d.re + grad.im * d.im, 0.0);
        RealJet {
            v: c(value, 0.0),
            fx: along(self.fx),
            fy: along(self.fy),
        }
    }
}

impl JetCarrier for RealJet {
    fn constant(k: Complex) -> Self {
        RealJet {
            v: k,
            fx: c(0.0, 0.0),
            fy: c(0.0, 0.0),
        }
    }
    fn variable(z: Complex) -> Self {
        RealJet {
            v: z,
            fx: c(1.0, 0.0),
            fy: c(0.0, 1.0),
        }
    }
    fn value(&self) -> Complex {
        self.v
    }
    fn add(&self, rhs: &Self) -> Self {
        RealJet {
            v: self.v + rhs.v,
            fx: self.fx + rhs.fx,
            fy: self.fy + rhs.fy,
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        RealJet {
            v: self.v - rhs.v,
            fx: self.fx - rhs.fx,
            fy: self.fy - rhs.fy,
        }
    }
    fn neg(&self) -> Self {
        RealJet {
            v: -self.v,
            fx: -self.fx,
            fy: -self.fy,
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        RealJet {
            v: self.v * rhs.v,
            fx: self.fx * rhs.v + self.v * rhs.fx,
            fy: self.fy * rhs.v + self.v * rhs.fy,
        }
    }
    fn div(&self, rhs: &Self, pole_floor: f64) -> Result<Self, Error> {
        if rhs.v.norm().is_nan() || rhs.v.norm() < pole_floor {
            return Err(Error::Pole {
                magnitude: rhs.v.norm(),
            });
        }
        let d2 = rhs.v * rhs.v;
        Ok(RealJet {
            v: self.v / rhs.v,
            fx: (self.fx * rhs.v - self.v * rhs.fx) / d2,
            fy: (self.fy * rhs.v - self.v * rhs.fy) / d2,
        })
    }
    fn conj(&self) -> Self {
        RealJet {
            v: self.v.conj(),
            fx: self.fx.conj(),
            fy: self.fy.conj(),
        }
    }
    fn apply(&self, g: Primitive, pole_floor: f64) -> Result<Self, Error> {
        let w = self.v;
        let value = g.value(w, pole_floor)?;
        let holomorphic = |d: Complex| {
            let (fx, fy) = self.scale(d);
            RealJet { v: value, fx, fy }
        };
        Ok(match g {
            Primitive::Exp => holomorphic(w.exp()),
            Primitive::Log => holomorphic(1.0 / w),
            Primitive::Sin => holomorphic(w.cos()),
            Primitive::Cos => holomorphic(-w.sin()),
            Primitive::Sqrt => holomorphic(0.5 / w.sqrt()),
            Primitive::PowInt(0) => holomorphic(c(0.0, 0.0)),
            Primitive::PowInt(k) => holomorphic(f64::from(k) * w.powi(k - 1)),
            Primitive::Conj => RealJet {
                v: value,
                ..self.conj()
            },
            Primitive::Re => self.real_chain(w.re, c(1.0, 0.0)),
            Primitive::Im => self.real_chain(w.im, c(0.0, 1.0)),
            Primitive::Abs2 => self.real_chain(value.re, w * 2.0),
            Primitive::Abs => self.real_chain(value.re, w / w.norm()),
            Primitive::Arg => self.real_chain(value.re, c(-w.im, w.re) / w.norm_sqr()),
        })
    }
    fn is_finite(&self) -> bool {
        [self.v, self.fx, self.fy]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Real gradient descent on `(x, y)` with step `mu / 2`.
pub fn real_coordinate_descent(cost: &Expr, z0: Complex, mu: f64, steps: usize) -> Vec<Complex> {
    let mut z = z0;
    let mut out = vec![z];
    for _ in 0..steps {
        let j: RealJet = wirtinger::eval(cost, z).expect("cost evaluates");
        let x = z.re - 0.5 * mu * j.fx.re;
        let y = z.im - 0.5 * mu * j.fy.re;
        z = c(x, y);
        out.push(z);
    }
    out
}

pub struct PlantedLsq {
    pub x: Vec<Vec<Complex>>,
    pub d: Vec<Complex>,
    pub a: Vec<Complex>,
    pub b: Vec<Complex>,
}

fn inner(f: &[Complex], g: &[Complex]) -> Complex {
    f.iter().zip(g).map(|(a, b)| a * b.conj()).sum()
}

/// Noise-free samples `dₖ = ⟨xₖ, a⟩ + ⟨xₖ*, b⟩` (`b` zero when strict).
pub fn planted_lsq(seed: u64, n: usize, m: usize, widely_linear: bool) -> PlantedLsq {
    let mut rng = rng(seed);
    let draw = |rng: &mut ChaCha8Rng| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let a: Vec<Complex> = (0..n).map(|_| draw(&mut rng)).collect();
    let b: Vec<Complex> = if widely_linear {
        (0..n).map(|_| draw(&mut rng)).collect()
    } else {
        vec![c(0.0, 0.0); n]
    };
    let x: Vec<Vec<Complex>> = (0..m)
        .map(|_| (0..n).map(|_| draw(&mut rng)).collect())
        .collect();
    let d = x
        .iter()
        .map(|row| {
            let rc: Vec<Complex> = row.iter().map(|v| v.conj()).collect();
            inner(row, &a) + inner(&rc, &b)
        })
        .collect();
    PlantedLsq { x, d, a, b }
}

/// Step size `1 / tr(G)` with `G` the Gram matrix of the stacked samples.
pub fn safe_step(p: &PlantedLsq, widely_linear: bool) -> f64 {
    let per_row: f64 =
        p.x.iter()
            .map(|r| r.iter().map(|v| v.norm_sqr()).sum::<f64>())
            .sum();
    let tr = if widely_linear {
        2.0 * per_row
    } else {
        per_row
    };
    1.0 / tr
}

pub const POLE_FLOOR: f64 = DEFAULT_POLE_FLOOR;
