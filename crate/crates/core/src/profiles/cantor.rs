use super::{Regularity, ScalarProfile};

const RESOLUTION: f64 = 1e-12;

/// Exact binary state of a fraction z ∈ (0, 1) written as num / 2^k.
struct Digits {
    num: u128,
    k: u32,
}

impl Digits {
    fn new(z: f64) -> Self {
        debug_assert!(z > 0.0 && z < 1.0);
        let bits = z.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        let (mut mant, e) = if raw_exp == 0 {
            (frac as u128, -1074)
        } else {
            ((frac | (1u64 << 52)) as u128, raw_exp - 1075)
        };
        let mut k = (-e) as u32;
        while k > 0 && mant & 1 == 0 {
            mant >>= 1;
            k -= 1;
        }
        // 3·num must fit in 128 bits; the discarded tail is far below 3^-40.
        if k > 126 {
            mant >>= k - 126;
            k = 126;
        }
        Digits { num: mant, k }
    }

    /// Next ternary digit.
    fn next(&mut self) -> u8 {
        self.num *= 3;
        let d = (self.num >> self.k) as u8;
        self.num -= (d as u128) << self.k;
        d
    }

    /// Current fractional position in [0, 1).
    fn position(&self) -> f64 {
        self.num as f64 * 2f64.powi(-(self.k as i32))
    }
}

/// Cantor function truncated after `depth` ternary digits (constant on the leaves).
pub fn cantor_function(z: f64, depth: u32) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if z >= 1.0 {
        return 1.0;
    }
    let mut digits = Digits::new(z);
    let mut result = 0.0;
    let mut scale = 0.5;
    for _ in 0..depth {
        match digits.next() {
            1 => return result + scale,
            2 => result += scale,
            _ => {}
        }
        scale *= 0.5;
    }
    result
}

/// U(z) = c(z) − z on [0, 1], 0 elsewhere, with c the Cantor function.
#[derive(Debug, Clone, Copy)]
pub struct CantorBv {
    pub depth: u32,
}

impl CantorBv {
    pub fn new(depth: u32) -> Self {
        CantorBv { depth }
    }

    /// True when z lies within the resolution of the depth-truncated Cantor set.
    pub fn near_cantor_set(&self, z: f64) -> bool {
        if z.abs() <= RESOLUTION || (z - 1.0).abs() <= RESOLUTION {
            return true;
        }
        if z <= 0.0 || z >= 1.0 {
            return false;
        }
        let mut digits = Digits::new(z);
        let mut len = 1.0;
        for _ in 0..self.depth {
            let d = digits.next();
            let third = len / 3.0;
            if d == 1 {
                let off = digits.position();
                return off.min(1.0 - off) * third <= RESOLUTION;
            }
            len = third;
            if len <= RESOLUTION {
                return true;
            }
        }
        true
    }

    /// ∫_0^z c.
    pub fn cantor_integral(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        if z >= 1.0 {
            return 0.5 + (z - 1.0);
        }
        let mut digits = Digits::new(z);
        let mut acc = 0.0;
        let mut mult = 1.0;
        for _ in 0..self.depth {
            match digits.next() {
                0 => mult /= 6.0,
                1 => return acc + mult * (1.0 / 12.0 + digits.position() / 6.0),
                _ => {
                    acc += mult * (0.25 + digits.position() / 6.0);
                    mult /= 6.0;
                }
            }
        }
        acc
    }
}

impl ScalarProfile for CantorBv {
    fn name(&self) -> String {
        "cantor_bv".into()
    }
    fn eval(&self, y: f64) -> f64 {
        if (0.0..=1.0).contains(&y) {
            cantor_function(y, self.depth) - y
        } else {
            0.0
        }
    }
    fn deriv(&self, y: f64) -> Option<f64> {
        if self.near_cantor_set(y) {
            None
        } else if (0.0..=1.0).contains(&y) {
            Some(-1.0)
        } else {
            Some(0.0)
        }
    }
    fn phase(&self, y: f64) -> f64 {
        if y <= 0.0 || y >= 1.0 {
            0.0
        } else {
            self.cantor_integral(y) - 0.5 * y * y
        }
    }
    fn regularity(&self) -> Regularity {
        Regularity::BvOnly
    }
    fn unresolved_leaf(&self, y: f64) -> Option<(f64, f64)> {
        if !(0.0..1.0).contains(&y) {
            return None;
        }
        if y == 0.0 {
            return Some((0.0, 3f64.powi(-(self.depth as i32))));
        }
        let mut digits = Digits::new(y);
        let (mut lo, mut len) = (0.0, 1.0);
        for _ in 0..self.depth {
            len /= 3.0;
            match digits.next() {
                0 => {}
                1 => return None,
                _ => lo += 2.0 * len,
            }
        }
        Some((lo, lo + len))
    }
    fn satisfies_l_n1(&self) -> bool {
        false
    }
}
