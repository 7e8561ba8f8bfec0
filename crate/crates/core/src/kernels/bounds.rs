use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::prolong::binomial;

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Ackermann–Péter function, evaluated on an explicit stack. Each stack
/// step counts against `budget`.
pub fn ackermann(x: u64, y: u64, budget: u64) -> Result<u64> {
    let mut steps = 0u64;
    ackermann_counted(x, y, budget, &mut steps)
}

fn ackermann_counted(x: u64, y: u64, budget: u64, steps: &mut u64) -> Result<u64> {
    let over = || Error::BudgetExceeded { budget };
    let mut stack = vec![x];
    let mut val = y;
    while let Some(x) = stack.pop() {
        *steps += 1;
        if *steps > budget {
            return Err(over());
        }
        if x == 0 {
            val = val.checked_add(1).ok_or_else(over)?;
        } else if val == 0 {
            stack.push(x - 1);
            val = 1;
        } else {
            stack.push(x - 1);
            stack.push(x);
            val -= 1;
        }
    }
    Ok(val)
}

/// Memoized C^n_{r,m}. The budget applies to each uncached evaluation.
#[derive(Debug)]
pub struct BoundTable {
    budget: u64,
    memo: Mutex<HashMap<(u64, u64, u64), u64>>,
}

impl Default for BoundTable {
    fn default() -> Self {
        Self::new(DEFAULT_BUDGET)
    }
}

impl BoundTable {
    pub fn new(budget: u64) -> Self {
        BoundTable { budget, memo: Mutex::new(HashMap::new()) }
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// C^1_{0,m} = 0, C^1_{r,m} = A(m−1, C^1_{r−1,m}), C^n_{r,m} = C^1_{C^{n−1}_{r,m}, m}.
    pub fn c(&self, n: u64, r: u64, m: u64) -> Result<u64> {
        if n == 0 || m == 0 {
            return Err(Error::BadIndex(format!("bound needs n, m ≥ 1 (got n = {}, m = {})", n, m)));
        }
        let mut steps = 0;
        self.c_inner(n, r, m, &mut steps)
    }

    fn c_inner(&self, n: u64, r: u64, m: u64, steps: &mut u64) -> Result<u64> {
        if let Some(&v) = self.memo.lock().expect("bound table lock").get(&(n, r, m)) {
            return Ok(v);
        }
        let v = if n == 1 {
            // iterate upward so deep r never recurses
            let mut c = 0;
            for _ in 0..r {
                c = ackermann_counted(m - 1, c, self.budget, steps)?;
            }
            c
        } else {
            let inner = self.c_inner(n - 1, r, m, steps)?;
            self.c_inner(1, inner, m, steps)?
        };
        self.memo.lock().expect("bound table lock").insert((n, r, m), v);
        Ok(v)
    }

    /// (α(n), β(n)) = (n·C(C+m, m), n·C(C−1+m, m)) with C = C^n_{1,m}.
    pub fn alpha_beta(&self, n: u64, m: u64) -> Result<(u64, u64)> {
        let c = self.c(n, 1, m)?;
        let alpha = n.checked_mul(binomial(c + m, m)).ok_or(Error::BudgetExceeded { budget: self.budget })?;
        let beta = n * binomial(c - 1 + m, m);
        Ok((alpha, beta))
    }
}

pub fn bound_c(n: u64, r: u64, m: u64) -> Result<u64> {
    BoundTable::default().c(n, r, m)
}

pub fn alpha_beta(n: u64, m: u64) -> Result<(u64, u64)> {
    BoundTable::default().alpha_beta(n, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ackermann() {
        assert_eq!(ackermann(0, 5, DEFAULT_BUDGET), Ok(6));
        assert_eq!(ackermann(1, 3, DEFAULT_BUDGET), Ok(5));
        assert_eq!(ackermann(2, 3, DEFAULT_BUDGET), Ok(9));
        assert_eq!(ackermann(3, 3, DEFAULT_BUDGET), Ok(61));
        assert_eq!(ackermann(4, 2, DEFAULT_BUDGET), Err(Error::BudgetExceeded { budget: DEFAULT_BUDGET }));
    }

    #[test]
    fn bound_examples() {
        assert_eq!(bound_c(1, 5, 1), Ok(5));
        assert_eq!(bound_c(3, 2, 2), Ok(16));
        assert_eq!(bound_c(1, 2, 3), Ok(9));
        assert_eq!(bound_c(1, 0, 7), Ok(0));
        assert!(matches!(bound_c(1, 3, 4), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(bound_c(0, 1, 1), Err(Error::BadIndex(_))));
    }

    #[test]
    fn alpha_beta_values() {
        for n in 1..=10 {
            assert_eq!(alpha_beta(n, 1), Ok((2 * n, n)));
        }
        assert_eq!(alpha_beta(1, 2), Ok((6, 3)));
        assert!(matches!(alpha_beta(0, 2), Err(Error::BadIndex(_))));
    }

    #[test]
    fn memo_is_consistent() {
        let t = BoundTable::default();
        let a = t.c(2, 3, 2).unwrap();
        assert_eq!(t.c(2, 3, 2).unwrap(), a);
        assert_eq!(a, 12);
    }
}
