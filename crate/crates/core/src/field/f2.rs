//! Bit-packed quadratic forms over F_2 for up to 64 variables.
//!
//! Vectors are `u64` bitmasks; a form stores its upper triangle as one
//! row mask per variable.  The evaluation identity used throughout:
//! `q(x) = XOR over set bits i of parity(rows[i] & x)`, and
//! polarization `b(x, y) = q(x^y) ^ q(x) ^ q(y)` reduces to a
//! per-variable mask lookup.  Semantics match the generic element path
//! exactly; the differential tests in the callers rely on that.

/// Upper-triangular bit form: `rows[i]` holds bits j >= i with c_ij = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct F2Form {
    n: usize,
    rows: Vec<u64>,
    /// bilinear masks: bit j of `bil[i]` is b(e_i, e_j) (zero diagonal).
    bil: Vec<u64>,
}

impl F2Form {
    /// Builds a form from upper-triangle row masks.
    pub fn new(n: usize, rows: Vec<u64>) -> Self {
        assert!(n <= 64 && rows.len() == n);
        let mut bil = vec![0u64; n];
        for i in 0..n {
            debug_assert_eq!(rows[i] & ((1u64 << i) - 1), 0, "row below diagonal");
            for j in (i + 1)..n {
                if (rows[i] >> j) & 1 == 1 {
                    bil[i] |= 1 << j;
                    bil[j] |= 1 << i;
                }
            }
        }
        F2Form { n, rows, bil }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// q(x) over F_2.
    pub fn eval(&self, x: u64) -> bool {
        let mut acc = 0u32;
        let mut rest = x;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            acc ^= (self.rows[i] & x).count_ones() & 1;
        }
        acc == 1
    }

    /// b(x, y) = q(x+y) - q(x) - q(y).
    pub fn bilinear(&self, x: u64, y: u64) -> bool {
        let mut acc = 0u32;
        let mut rest = x;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            acc ^= (self.bil[i] & y).count_ones() & 1;
        }
        acc == 1
    }

    /// Mask m with bit j = b(e_j, x); the gradient of q at x.
    pub fn gradient(&self, x: u64) -> u64 {
        let mut g = 0u64;
        for j in 0..self.n {
            if self.bilinear(1 << j, x) {
                g |= 1 << j;
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // q = x1*x2 + x3^2 + x3*x4 + x4^2 on four variables (0-indexed rows).
    fn sample() -> F2Form {
        F2Form::new(4, vec![0b0010, 0b0000, 0b1100, 0b1000])
    }

    #[test]
    fn eval_agrees_with_direct_expansion() {
        let q = sample();
        let direct = |x: u64| {
            let b = |i: usize| (x >> i) & 1;
            (b(0) * b(1) + b(2) + b(2) * b(3) + b(3)) % 2 == 1
        };
        let mut zeros = 0;
        for x in 0..16u64 {
            assert_eq!(q.eval(x), direct(x));
            if !q.eval(x) {
                zeros += 1;
            }
        }
        assert_eq!(zeros, 6);
    }

    #[test]
    fn polarization_identity_holds_everywhere() {
        let q = sample();
        for x in 0..16u64 {
            for y in 0..16u64 {
                let lhs = q.bilinear(x, y);
                let rhs = q.eval(x ^ y) ^ q.eval(x) ^ q.eval(y);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn bilinear_is_alternating() {
        let q = sample();
        for x in 0..16u64 {
            assert!(!q.bilinear(x, x));
        }
    }
}
