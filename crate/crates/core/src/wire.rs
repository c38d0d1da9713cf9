//! Binary encoding helpers shared by every proof type.
//!
//! Every proof is a header (type specific, possibly empty) followed by
//!
//! ```text
//! u32-le(point count) ∥ points (32 bytes each, compressed)
//! u32-le(scalar count) ∥ scalars (32 bytes each, canonical little-endian)
//! ```
//!
//! Decoding validates every element and checks the counts against the
//! layout implied by the header.

use crate::errors::WireError;
use crate::group::{
    decode_point, decode_scalar, encode_point, encode_scalar, GroupPoint, GroupScalar,
    POINT_BYTES, SCALAR_BYTES,
};

/// Flat view of a proof's group elements, in serialization order.
///
/// `with_parts` rebuilds a proof of the same shape from modified element
/// lists; it is what the tamper sweeps use to flip one field at a time.
pub trait ProofParts: Sized {
    fn to_parts(&self) -> (Vec<GroupPoint>, Vec<GroupScalar>);

    /// Rebuilds `self`'s shape from `points`/`scalars`. Counts must match
    /// those returned by [`ProofParts::to_parts`].
    fn with_parts(&self, points: &[GroupPoint], scalars: &[GroupScalar]) -> Self;

    fn element_counts(&self) -> (usize, usize) {
        let (p, s) = self.to_parts();
        (p.len(), s.len())
    }
}

/// Size in bytes of `points` compressed points and `scalars` scalars,
/// ignoring headers.
pub fn element_bytes(points: usize, scalars: usize) -> usize {
    points * POINT_BYTES + scalars * SCALAR_BYTES
}

#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn i128(&mut self, v: i128) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn bytes(&mut self, v: &[u8]) {
        self.buf.extend_from_slice(v);
    }

    /// `u16-le(len) ∥ bytes`.
    pub fn short_bytes(&mut self, v: &[u8]) {
        self.u16(v.len() as u16);
        self.bytes(v);
    }

    pub fn point(&mut self, p: &GroupPoint) {
        self.buf.extend_from_slice(&encode_point(p));
    }

    pub fn scalar(&mut self, s: &GroupScalar) {
        self.buf.extend_from_slice(&encode_scalar(s));
    }

    /// Counted point and scalar sections.
    pub fn parts(&mut self, points: &[GroupPoint], scalars: &[GroupScalar]) {
        self.u32(points.len() as u32);
        points.iter().for_each(|p| self.point(p));
        self.u32(scalars.len() as u32);
        scalars.iter().for_each(|s| self.scalar(s));
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf }
    }

    pub fn remaining(&self) -> usize {
        self.buf.len()
    }

    pub fn finish(&self) -> Result<(), WireError> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(WireError::TrailingBytes)
        }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if self.buf.len() < n {
            return Err(WireError::Truncated);
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    pub fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16, WireError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    pub fn u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    pub fn i128(&mut self) -> Result<i128, WireError> {
        Ok(i128::from_le_bytes(self.take(16)?.try_into().expect("16 bytes")))
    }

    pub fn short_bytes(&mut self) -> Result<&'a [u8], WireError> {
        let len = self.u16()? as usize;
        self.take(len)
    }

    pub fn point(&mut self) -> Result<GroupPoint, WireError> {
        decode_point(self.take(POINT_BYTES)?)
    }

    pub fn scalar(&mut self) -> Result<GroupScalar, WireError> {
        decode_scalar(self.take(SCALAR_BYTES)?)
    }

    /// Reads counted point and scalar sections, requiring exactly the
    /// expected counts.
    pub fn parts(
        &mut self,
        points: usize,
        scalars: usize,
    ) -> Result<(Vec<GroupPoint>, Vec<GroupScalar>), WireError> {
        if self.u32()? as usize != points {
            return Err(WireError::BadLayout);
        }
        let pts = (0..points).map(|_| self.point()).collect::<Result<Vec<_>, _>>()?;
        if self.u32()? as usize != scalars {
            return Err(WireError::BadLayout);
        }
        let scs = (0..scalars).map(|_| self.scalar()).collect::<Result<Vec<_>, _>>()?;
        Ok((pts, scs))
    }

    /// Reads counted sections whose sizes are not known up front. Counts are
    /// bounded by the remaining input before allocating.
    pub fn parts_any(&mut self) -> Result<(Vec<GroupPoint>, Vec<GroupScalar>), WireError> {
        let np = self.u32()? as usize;
        if np.saturating_mul(POINT_BYTES) > self.remaining() {
            return Err(WireError::Truncated);
        }
        let pts = (0..np).map(|_| self.point()).collect::<Result<Vec<_>, _>>()?;
        let ns = self.u32()? as usize;
        if ns.saturating_mul(SCALAR_BYTES) > self.remaining() {
            return Err(WireError::Truncated);
        }
        let scs = (0..ns).map(|_| self.scalar()).collect::<Result<Vec<_>, _>>()?;
        Ok((pts, scs))
    }
}

/// Splits a flat element list into consecutive chunks.
pub(crate) struct PartCursor<'a, T> {
    items: &'a [T],
}

impl<'a, T: Clone> PartCursor<'a, T> {
    pub fn new(items: &'a [T]) -> Self {
        PartCursor { items }
    }

    pub fn take(&mut self, n: usize) -> &'a [T] {
        let (head, tail) = self.items.split_at(n);
        self.items = tail;
        head
    }

    pub fn one(&mut self) -> T {
        self.take(1)[0].clone()
    }
}
