use std::fmt;

use crate::error::{Error, Result};
use crate::perm::{check_degree, Permutation};

/// A subset of `{0, .., n-1}` stored as a 32-bit mask. Printed 1-based in
/// square brackets, e.g. `[3,4,5,6]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    degree: u8,
    bits: u32,
}

#[inline]
pub(crate) fn full_mask(degree: usize) -> u32 {
    if degree >= 32 {
        u32::MAX
    } else {
        (1u32 << degree) - 1
    }
}

impl SubsetMask {
    pub fn new(degree: usize, bits: u32) -> Result<Self> {
        check_degree(degree)?;
        if bits & !full_mask(degree) != 0 {
            return Err(Error::Invalid(format!(
                "mask {bits:#x} has points beyond degree {degree}"
            )));
        }
        Ok(Self {
            degree: degree as u8,
            bits,
        })
    }

    #[inline]
    pub(crate) fn from_bits_unchecked(degree: usize, bits: u32) -> Self {
        debug_assert!(bits & !full_mask(degree) == 0);
        Self {
            degree: degree as u8,
            bits,
        }
    }

    pub fn empty(degree: usize) -> Result<Self> {
        Self::new(degree, 0)
    }

    pub fn full(degree: usize) -> Result<Self> {
        check_degree(degree)?;
        Ok(Self::from_bits_unchecked(degree, full_mask(degree)))
    }

    /// From 1-based points.
    pub fn from_points(degree: usize, points: &[usize]) -> Result<Self> {
        check_degree(degree)?;
        let mut bits = 0u32;
        for &p in points {
            if p < 1 || p > degree {
                return Err(Error::Invalid(format!("point {p} outside 1..={degree}")));
            }
            bits |= 1 << (p - 1);
        }
        Ok(Self::from_bits_unchecked(degree, bits))
    }

    /// Parses `[a,b,...]` (1-based, whitespace tolerated, `[]` is empty).
    /// Ranges `a..b` are accepted as items, so `[5..10]` is `[5,6,7,8,9,10]`.
    pub fn parse(text: &str, degree: usize) -> Result<Self> {
        let t = text.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::parse(0, format!("expected [..], got {t:?}")))?;
        let mut points = Vec::new();
        for item in inner.split(',') {
            let item = item.trim();
            if item.is_empty() {
                if inner.trim().is_empty() {
                    break;
                }
                return Err(Error::parse(0, format!("empty item in {t:?}")));
            }
            if let Some((a, b)) = item.split_once("..") {
                let a: usize = a.trim().parse().map_err(|_| Error::parse(0, item))?;
                let b: usize = b.trim().parse().map_err(|_| Error::parse(0, item))?;
                points.extend(a..=b);
            } else {
                points.push(item.parse().map_err(|_| Error::parse(0, item))?);
            }
        }
        Self::from_points(degree, &points)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, point: usize) -> bool {
        point < 32 && self.bits & (1 << point) != 0
    }

    pub fn complement(&self) -> Self {
        Self::from_bits_unchecked(self.degree(), !self.bits & full_mask(self.degree()))
    }

    /// 0-based points in ascending order.
    pub fn points(&self) -> impl Iterator<Item = usize> {
        let mut b = self.bits;
        std::iter::from_fn(move || {
            if b == 0 {
                None
            } else {
                let i = b.trailing_zeros() as usize;
                b &= b - 1;
                Some(i)
            }
        })
    }

    pub fn image(&self, g: &Permutation) -> Self {
        debug_assert_eq!(g.degree(), self.degree());
        Self::from_bits_unchecked(self.degree(), g.apply_mask(self.bits))
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, p) in self.points().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", p + 1)?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/{}", self.degree)
    }
}

/// Byte-sliced lookup tables for applying one permutation to many masks.
pub(crate) struct MaskImager {
    tables: Box<[[u32; 256]; 4]>,
}

impl MaskImager {
    pub fn new(g: &Permutation) -> Self {
        let mut tables = Box::new([[0u32; 256]; 4]);
        for (byte, table) in tables.iter_mut().enumerate() {
            for v in 0..256u32 {
                let mask = v << (8 * byte);
                let valid = mask & full_mask(g.degree());
                table[v as usize] = g.apply_mask(valid);
            }
        }
        Self { tables }
    }

    #[inline]
    pub fn apply(&self, m: u32) -> u32 {
        self.tables[0][(m & 0xff) as usize]
            | self.tables[1][((m >> 8) & 0xff) as usize]
            | self.tables[2][((m >> 16) & 0xff) as usize]
            | self.tables[3][(m >> 24) as usize]
    }
}
