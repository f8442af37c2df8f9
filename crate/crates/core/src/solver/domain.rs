//! Finite integer domains: an interval with an optional set of removed
//! interior values.

use std::collections::BTreeSet;
use std::fmt;

/// Raised when a domain becomes empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fail;

pub type PropResult = Result<bool, Fail>;

/// Bounds used for variables that stand for intermediate terms.
pub const WIDE: i64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    lo: i64,
    hi: i64,
    /// Removed values, always strictly inside `(lo, hi)`.
    holes: BTreeSet<i64>,
}

impl Domain {
    pub fn new(lo: i64, hi: i64) -> Self {
        Domain {
            lo,
            hi,
            holes: BTreeSet::new(),
        }
    }

    /// Signed `bits`-bit range.
    pub fn bits(bits: u32) -> Self {
        let half = 1i64 << (bits - 1);
        Domain::new(-half, half - 1)
    }

    pub fn wide() -> Self {
        Domain::new(-WIDE, WIDE)
    }

    pub fn singleton(v: i64) -> Self {
        Domain::new(v, v)
    }

    pub fn from_values(values: impl IntoIterator<Item = i64>) -> Self {
        let set: BTreeSet<i64> = values.into_iter().collect();
        let (Some(&lo), Some(&hi)) = (set.first(), set.last()) else {
            return Domain::new(1, 0);
        };
        let holes = (lo..=hi).filter(|v| !set.contains(v)).collect();
        Domain { lo, hi, holes }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn is_fixed(&self) -> bool {
        self.lo == self.hi
    }

    pub fn value(&self) -> Option<i64> {
        self.is_fixed().then_some(self.lo)
    }

    pub fn size(&self) -> u128 {
        if self.is_empty() {
            0
        } else {
            (self.hi as i128 - self.lo as i128 + 1) as u128 - self.holes.len() as u128
        }
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi && !self.holes.contains(&v)
    }

    pub fn has_holes(&self) -> bool {
        !self.holes.is_empty()
    }

    /// Values in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        let (lo, hi) = if self.is_empty() { (1, 0) } else { (self.lo, self.hi) };
        (lo..=hi).filter(move |v| !self.holes.contains(v))
    }

    fn normalize(&mut self) -> PropResult {
        while self.lo <= self.hi && self.holes.remove(&self.lo) {
            self.lo += 1;
        }
        while self.lo <= self.hi && self.holes.remove(&self.hi) {
            self.hi -= 1;
        }
        if self.lo > self.hi {
            self.holes.clear();
            return Err(Fail);
        }
        if let Some(&first) = self.holes.first() {
            if first < self.lo {
                self.holes = self.holes.split_off(&self.lo);
            }
        }
        if let Some(&last) = self.holes.last() {
            if last > self.hi {
                let _ = self.holes.split_off(&(self.hi + 1));
            }
        }
        Ok(true)
    }

    pub fn set_lo(&mut self, v: i128) -> PropResult {
        if v <= self.lo as i128 {
            return Ok(false);
        }
        if v > self.hi as i128 {
            self.lo = self.hi + 1;
            self.holes.clear();
            return Err(Fail);
        }
        self.lo = v as i64;
        self.normalize()
    }

    pub fn set_hi(&mut self, v: i128) -> PropResult {
        if v >= self.hi as i128 {
            return Ok(false);
        }
        if v < self.lo as i128 {
            self.hi = self.lo - 1;
            self.holes.clear();
            return Err(Fail);
        }
        self.hi = v as i64;
        self.normalize()
    }

    pub fn remove(&mut self, v: i64) -> PropResult {
        if !self.contains(v) {
            return Ok(false);
        }
        if v == self.lo || v == self.hi {
            self.holes.insert(v);
            return self.normalize();
        }
        self.holes.insert(v);
        Ok(true)
    }

    /// Remove every value of `[a, b]`. Interior ranges wider than
    /// `max_holes` are left alone.
    pub fn remove_range(&mut self, a: i64, b: i64, max_holes: u64) -> PropResult {
        if a > b || b < self.lo || a > self.hi {
            return Ok(false);
        }
        if a <= self.lo {
            return self.set_lo(b as i128 + 1);
        }
        if b >= self.hi {
            return self.set_hi(a as i128 - 1);
        }
        if (b - a) as u64 >= max_holes {
            return Ok(false);
        }
        let mut changed = false;
        for v in a..=b {
            changed |= self.holes.insert(v);
        }
        Ok(changed)
    }

    pub fn fix(&mut self, v: i64) -> PropResult {
        if !self.contains(v) {
            self.lo = 1;
            self.hi = 0;
            self.holes.clear();
            return Err(Fail);
        }
        if self.is_fixed() {
            return Ok(false);
        }
        self.lo = v;
        self.hi = v;
        self.holes.clear();
        Ok(true)
    }

    /// Intersect with another domain.
    pub fn intersect(&mut self, other: &Domain) -> PropResult {
        let mut changed = self.set_lo(other.lo as i128)?;
        changed |= self.set_hi(other.hi as i128)?;
        if other.has_holes() {
            let holes: Vec<i64> = other.holes.range(self.lo..=self.hi).copied().collect();
            for h in holes {
                changed |= self.remove(h)?;
            }
        }
        Ok(changed)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        write!(f, "[{}, {}]", self.lo, self.hi)?;
        if !self.holes.is_empty() {
            write!(f, " \\ {:?}", self.holes)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_ranges() {
        assert_eq!(Domain::bits(8), Domain::new(-128, 127));
        assert_eq!(Domain::bits(4).size(), 16);
    }

    #[test]
    fn holes_at_bounds_shrink_interval() {
        let mut d = Domain::new(0, 5);
        d.remove(2).unwrap();
        d.remove(3).unwrap();
        assert_eq!(d.size(), 4);
        d.set_lo(2).unwrap();
        assert_eq!(d.lo(), 4);
        assert!(!d.has_holes());
        assert_eq!(d.iter().collect::<Vec<_>>(), [4, 5]);
    }

    #[test]
    fn emptying_fails() {
        let mut d = Domain::new(3, 3);
        assert_eq!(d.remove(3), Err(Fail));
        assert!(d.is_empty());
        let mut d = Domain::new(5, 10);
        assert_eq!(d.set_hi(3), Err(Fail));
    }

    #[test]
    fn from_values_roundtrip() {
        let d = Domain::from_values([-2, 2]);
        assert_eq!(d.iter().collect::<Vec<_>>(), [-2, 2]);
        let mut e = Domain::new(-3, 3);
        e.intersect(&d).unwrap();
        assert_eq!(e, d);
    }
}
