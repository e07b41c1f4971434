//! On-disk formats for TT-tensors.
//!
//! Binary layout (all integers `u64`, all values `f64`, little-endian):
//!
//! ```text
//! offset  content
//! 0       magic b"TTR1"
//! 4       N (order)
//! 12      dims[0..N]
//! ..      ranks[0..N+1]          (ranks[0] = ranks[N] = 1)
//! ..      core 0 entries, core 1 entries, ..., core N-1 entries
//! ```
//!
//! Core `n` holds `ranks[n] * dims[n] * ranks[n+1]` values with the left rank
//! index fastest, then the mode index, then the right rank index.
//!
//! The JSON mirror carries the same fields:
//! `{"format": "TTR1", "dims": [..], "ranks": [..], "cores": [[..], ..]}`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{TtCore, TtTensor};
use crate::{Result, TtError};

pub const MAGIC: &[u8; 4] = b"TTR1";

/// Upper bound on the order accepted when reading, to reject garbage headers.
const MAX_ORDER: u64 = 1 << 16;

pub fn write_binary<W: Write>(tt: &TtTensor, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(tt.order() as u64).to_le_bytes())?;
    for d in tt.dims() {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    for r in tt.ranks() {
        w.write_all(&(r as u64).to_le_bytes())?;
    }
    for core in tt.cores() {
        for v in core.as_slice() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub fn read_binary<R: Read>(mut r: R) -> Result<TtTensor> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(TtError::Format(format!(
            "bad magic {magic:?}, expected TTR1"
        )));
    }
    let n = read_u64(&mut r)?;
    if n == 0 || n > MAX_ORDER {
        return Err(TtError::Format(format!("unsupported order {n}")));
    }
    let n = n as usize;
    let dims = (0..n)
        .map(|_| read_u64(&mut r).map(|v| v as usize))
        .collect::<Result<Vec<_>>>()?;
    let ranks = (0..=n)
        .map(|_| read_u64(&mut r).map(|v| v as usize))
        .collect::<Result<Vec<_>>>()?;
    let mut cores = Vec::with_capacity(n);
    for k in 0..n {
        let len = ranks[k]
            .checked_mul(dims[k])
            .and_then(|v| v.checked_mul(ranks[k + 1]))
            .ok_or_else(|| TtError::Format("core size overflows".into()))?;
        let mut bytes = vec![0u8; len * 8];
        r.read_exact(&mut bytes)?;
        let data = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        cores.push(TtCore::new(ranks[k], dims[k], ranks[k + 1], data)?);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(TtError::Format("trailing bytes after last core".into()));
    }
    TtTensor::new(cores)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TtJson {
    pub format: String,
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub cores: Vec<Vec<f64>>,
}

impl From<&TtTensor> for TtJson {
    fn from(tt: &TtTensor) -> Self {
        TtJson {
            format: "TTR1".into(),
            dims: tt.dims(),
            ranks: tt.ranks(),
            cores: tt.cores().iter().map(|c| c.as_slice().to_vec()).collect(),
        }
    }
}

impl TryFrom<TtJson> for TtTensor {
    type Error = TtError;

    fn try_from(j: TtJson) -> Result<Self> {
        if j.format != "TTR1" {
            return Err(TtError::Format(format!(
                "unknown format tag {:?}",
                j.format
            )));
        }
        if j.ranks.len() != j.dims.len() + 1 || j.cores.len() != j.dims.len() {
            return Err(TtError::Format(
                "dims, ranks and cores disagree in length".into(),
            ));
        }
        let cores = j
            .cores
            .into_iter()
            .enumerate()
            .map(|(k, data)| TtCore::new(j.ranks[k], j.dims[k], j.ranks[k + 1], data))
            .collect::<Result<Vec<_>>>()?;
        TtTensor::new(cores)
    }
}

pub fn to_json(tt: &TtTensor) -> Result<String> {
    Ok(serde_json::to_string_pretty(&TtJson::from(tt))?)
}

pub fn from_json(s: &str) -> Result<TtTensor> {
    TtTensor::try_from(serde_json::from_str::<TtJson>(s)?)
}

/// Writes the binary format, or the JSON mirror when the path ends in `.json`.
pub fn save(tt: &TtTensor, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e == "json") {
        std::fs::write(path, to_json(tt)?)?;
        Ok(())
    } else {
        write_binary(tt, BufWriter::new(File::create(path)?))
    }
}

/// Reads either format, dispatching on the `.json` extension.
pub fn load(path: impl AsRef<Path>) -> Result<TtTensor> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e == "json") {
        from_json(&std::fs::read_to_string(path)?)
    } else {
        read_binary(BufReader::new(File::open(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tt::{random_gaussian_tt, RankProfile};

    fn sample() -> TtTensor {
        random_gaussian_tt(&[3, 2, 4], &RankProfile::new(vec![2, 3]).unwrap(), 5).unwrap()
    }

    #[test]
    fn header_layout_is_fixed() {
        let tt = TtTensor::ones(&[2, 3]);
        let mut buf = Vec::new();
        write_binary(&tt, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"TTR1");
        assert_eq!(u64::from_le_bytes(buf[4..12].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(buf[12..20].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(buf[20..28].try_into().unwrap()), 3);
        // ranks 1,1,1 then 5 values
        assert_eq!(buf.len(), 4 + 8 + 2 * 8 + 3 * 8 + 5 * 8);
        assert_eq!(f64::from_le_bytes(buf[52..60].try_into().unwrap()), 1.0);
    }

    #[test]
    fn binary_and_json_round_trip() {
        let tt = sample();
        let mut buf = Vec::new();
        write_binary(&tt, &mut buf).unwrap();
        assert_eq!(read_binary(buf.as_slice()).unwrap(), tt);
        assert_eq!(from_json(&to_json(&tt).unwrap()).unwrap(), tt);
    }

    #[test]
    fn corrupt_input_is_rejected() {
        let tt = sample();
        let mut buf = Vec::new();
        write_binary(&tt, &mut buf).unwrap();
        assert!(read_binary(&buf[..buf.len() - 3]).is_err());
        let mut extra = buf.clone();
        extra.push(0);
        assert!(matches!(
            read_binary(extra.as_slice()),
            Err(TtError::Format(_))
        ));
        buf[0] = b'X';
        assert!(matches!(
            read_binary(buf.as_slice()),
            Err(TtError::Format(_))
        ));
    }

    #[test]
    fn files_dispatch_on_extension() {
        let dir = tempfile::tempdir().unwrap();
        let tt = sample();
        for name in ["x.tt", "x.json"] {
            let p = dir.path().join(name);
            save(&tt, &p).unwrap();
            assert_eq!(load(&p).unwrap(), tt);
        }
    }
}
