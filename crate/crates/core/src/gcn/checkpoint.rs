//! Little-endian weight dump.
//!
//! ```text
//! magic   8 bytes  "AGEGCN01"
//! rows0   u64      W0 rows (features)
//! cols0   u64      W0 cols (hidden)
//! data0   f64 × rows0·cols0, row-major
//! rows1   u64      W1 rows (hidden)
//! cols1   u64      W1 cols (classes)
//! data1   f64 × rows1·cols1, row-major
//! ```
//!
//! Optimizer state is not stored.

use std::io::{Read, Write};

use crate::error::{AgeError, Result};
use crate::gcn::GcnModel;
use crate::numerics::DenseMatrix;

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"AGEGCN01";

fn io_err(e: std::io::Error) -> AgeError {
    AgeError::io("<checkpoint>", e)
}

pub fn write_checkpoint(model: &GcnModel, out: &mut impl Write) -> Result<()> {
    out.write_all(CHECKPOINT_MAGIC).map_err(io_err)?;
    for m in [model.w0(), model.w1()] {
        out.write_all(&(m.rows() as u64).to_le_bytes()).map_err(io_err)?;
        out.write_all(&(m.cols() as u64).to_le_bytes()).map_err(io_err)?;
        for v in m.as_slice() {
            out.write_all(&v.to_le_bytes()).map_err(io_err)?;
        }
    }
    Ok(())
}

pub fn read_checkpoint(input: &mut impl Read) -> Result<GcnModel> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic).map_err(io_err)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(AgeError::Parameter("not a GCN checkpoint (bad magic)".into()));
    }
    let read_u64 = |input: &mut dyn Read| -> Result<u64> {
        let mut b = [0u8; 8];
        input.read_exact(&mut b).map_err(io_err)?;
        Ok(u64::from_le_bytes(b))
    };
    let mut mats = Vec::with_capacity(2);
    for _ in 0..2 {
        let rows = read_u64(input)? as usize;
        let cols = read_u64(input)? as usize;
        let len = rows
            .checked_mul(cols)
            .filter(|&l| l <= (1 << 32))
            .ok_or_else(|| AgeError::Parameter("checkpoint shape too large".into()))?;
        let data = (0..len)
            .map(|_| read_u64(input).map(f64::from_bits))
            .collect::<Result<Vec<_>>>()?;
        mats.push(DenseMatrix::from_vec(rows, cols, data)?);
    }
    let w1 = mats.pop().expect("two matrices");
    let w0 = mats.pop().expect("two matrices");
    GcnModel::from_weights(w0, w1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SeededRng;

    #[test]
    fn round_trip() {
        let model = GcnModel::new(5, 3, 4, &mut SeededRng::new(8, 0));
        let mut buf = Vec::new();
        write_checkpoint(&model, &mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 16 + 15 * 8 + 16 + 12 * 8);
        assert_eq!(&buf[..8], CHECKPOINT_MAGIC);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 5);
        let back = read_checkpoint(&mut buf.as_slice()).unwrap();
        assert_eq!(back.w0(), model.w0());
        assert_eq!(back.w1(), model.w1());
    }

    #[test]
    fn bad_magic() {
        let buf = b"NOTACKPT".to_vec();
        assert!(read_checkpoint(&mut buf.as_slice()).is_err());
    }
}
