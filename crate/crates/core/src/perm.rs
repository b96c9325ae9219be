//! Permutations of `{0, .., n-1}` for `n <= 32`.
//!
//! Points are 0-based internally and 1-based in cycle notation. Permutations
//! act on the right: `compose(g, h)` applies `g` first, so that
//! `i^(gh) = (i^g)^h`.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    degree: u8,
    // Entries at positions >= degree are kept fixed so that derived
    // equality and hashing only see the meaningful part.
    images: [u8; MAX_DEGREE],
}

const IDENTITY_IMAGES: [u8; MAX_DEGREE] = {
    let mut a = [0u8; MAX_DEGREE];
    let mut i = 0;
    while i < MAX_DEGREE {
        a[i] = i as u8;
        i += 1;
    }
    a
};

pub(crate) fn check_degree(degree: usize) -> Result<()> {
    if degree == 0 || degree > MAX_DEGREE {
        Err(Error::Degree(degree))
    } else {
        Ok(())
    }
}

impl Permutation {
    pub fn identity(degree: usize) -> Result<Self> {
        check_degree(degree)?;
        Ok(Self {
            degree: degree as u8,
            images: IDENTITY_IMAGES,
        })
    }

    pub(crate) fn identity_unchecked(degree: usize) -> Self {
        debug_assert!((1..=MAX_DEGREE).contains(&degree));
        Self {
            degree: degree as u8,
            images: IDENTITY_IMAGES,
        }
    }

    /// Builds a permutation from its 0-based image table.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        check_degree(n)?;
        let mut seen = 0u32;
        let mut table = IDENTITY_IMAGES;
        for (i, &img) in images.iter().enumerate() {
            if img >= n || seen & (1 << img) != 0 {
                return Err(Error::NotBijection(n));
            }
            seen |= 1 << img;
            table[i] = img as u8;
        }
        Ok(Self {
            degree: n as u8,
            images: table,
        })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    #[inline]
    pub fn image(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> &[u8] {
        &self.images[..self.degree()]
    }

    pub fn is_identity(&self) -> bool {
        self.images == IDENTITY_IMAGES
    }

    /// `g` then `h`. Fails if the degrees differ.
    pub fn compose(&self, h: &Permutation) -> Result<Permutation> {
        if self.degree != h.degree {
            return Err(Error::DegreeMismatch(self.degree(), h.degree()));
        }
        Ok(self.then(h))
    }

    #[inline]
    pub(crate) fn then(&self, h: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree, h.degree);
        let mut images = IDENTITY_IMAGES;
        let n = self.degree();
        for (dst, &src) in images[..n].iter_mut().zip(&self.images[..n]) {
            *dst = h.images[src as usize];
        }
        Permutation {
            degree: self.degree,
            images,
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = IDENTITY_IMAGES;
        for i in 0..self.degree() {
            images[self.images[i] as usize] = i as u8;
        }
        Permutation {
            degree: self.degree,
            images,
        }
    }

    /// `c^-1 g c`, the conjugate of `self` by `c` under the right action.
    pub fn conjugate_by(&self, c: &Permutation) -> Permutation {
        c.inverse().then(self).then(c)
    }

    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut base = *self;
        let mut acc = Permutation::identity_unchecked(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        acc
    }

    /// Smallest moved point, if any.
    pub fn first_moved(&self) -> Option<usize> {
        (0..self.degree()).find(|&i| self.image(i) != i)
    }

    /// Image of a point set given as a bit mask.
    #[inline]
    pub fn apply_mask(&self, mut mask: u32) -> u32 {
        let mut out = 0u32;
        while mask != 0 {
            let i = mask.trailing_zeros() as usize;
            out |= 1 << self.images[i];
            mask &= mask - 1;
        }
        out
    }

    /// Disjoint cycles of length >= 2, each starting at its smallest point,
    /// ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = 0u32;
        let mut out = Vec::new();
        for start in 0..n {
            if seen & (1 << start) != 0 || self.image(start) == start {
                continue;
            }
            let mut cycle = vec![start];
            seen |= 1 << start;
            let mut p = self.image(start);
            while p != start {
                seen |= 1 << p;
                cycle.push(p);
                p = self.image(p);
            }
            out.push(cycle);
        }
        out
    }

    /// Sorted cycle lengths, fixed points included as 1s.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        let moved: usize = lens.iter().sum();
        lens.extend(std::iter::repeat_n(1, self.degree() - moved));
        lens.sort_unstable();
        lens
    }

    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1u64, |acc, c| lcm(acc, c.len() as u64))
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }

    /// Same permutation on a larger domain, new points fixed.
    pub fn extend_to(&self, degree: usize) -> Result<Permutation> {
        check_degree(degree)?;
        if degree < self.degree() {
            return Err(Error::DegreeMismatch(self.degree(), degree));
        }
        Ok(Permutation {
            degree: degree as u8,
            images: self.images,
        })
    }

    /// Parses a product of disjoint cycles of 1-based points, e.g.
    /// `"(1,2,5)(3,4,6)"`. Whitespace is ignored; `""` and `"()"` give the
    /// identity.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation> {
        check_degree(degree)?;
        let mut images = IDENTITY_IMAGES;
        let mut used = 0u32;
        let bytes = text.as_bytes();
        let mut pos = 0;

        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };

        loop {
            skip_ws(&mut pos);
            if pos >= bytes.len() {
                break;
            }
            if bytes[pos] != b'(' {
                return Err(Error::parse(pos, "expected '('"));
            }
            pos += 1;
            let mut cycle: Vec<usize> = Vec::new();
            skip_ws(&mut pos);
            if pos < bytes.len() && bytes[pos] == b')' {
                pos += 1;
                continue;
            }
            loop {
                skip_ws(&mut pos);
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    return Err(Error::parse(pos, "expected a point"));
                }
                let point: usize = text[start..pos]
                    .parse()
                    .map_err(|_| Error::parse(start, "point out of range"))?;
                if point < 1 || point > degree {
                    return Err(Error::parse(
                        start,
                        format!("point {point} outside 1..={degree}"),
                    ));
                }
                let p = point - 1;
                if used & (1 << p) != 0 {
                    return Err(Error::parse(start, format!("point {point} repeated")));
                }
                used |= 1 << p;
                cycle.push(p);
                skip_ws(&mut pos);
                match bytes.get(pos) {
                    Some(b',') => pos += 1,
                    Some(b')') => {
                        pos += 1;
                        break;
                    }
                    Some(_) => return Err(Error::parse(pos, "expected ',' or ')'")),
                    None => return Err(Error::parse(pos, "unterminated cycle")),
                }
            }
            for (k, &p) in cycle.iter().enumerate() {
                images[p] = cycle[(k + 1) % cycle.len()] as u8;
            }
        }
        Ok(Permutation {
            degree: degree as u8,
            images,
        })
    }

    /// Canonical cycle notation; see [`Permutation::cycles`] for ordering.
    pub fn print_cycles(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            f.write_str("(")?;
            for (k, p) in c.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", p + 1)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.degree, self)
    }
}

impl Mul for Permutation {
    type Output = Permutation;

    /// Panics on degree mismatch; use [`Permutation::compose`] for a checked
    /// product.
    fn mul(self, rhs: Permutation) -> Permutation {
        assert_eq!(self.degree, rhs.degree, "degree mismatch");
        self.then(&rhs)
    }
}

impl<'a> Mul<&'a Permutation> for &'a Permutation {
    type Output = Permutation;

    fn mul(self, rhs: &'a Permutation) -> Permutation {
        assert_eq!(self.degree, rhs.degree, "degree mismatch");
        self.then(rhs)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}
