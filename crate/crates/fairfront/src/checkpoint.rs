//! Archive entry checkpoints.
//!
//! A checkpoint is a short text header followed by the raw parameters:
//!
//! ```text
//! fairfront-checkpoint 1
//! arch 8:16:relu
//! id 123
//! error 0.1225
//! delta_tpr 0.0375
//! values 161
//! end
//! <161 little-endian f64>
//! ```

use std::fs;
use std::path::Path;

use fairfront_core::model::{Architecture, ParamVector};
use fairfront_core::moea::ArchiveEntry;
use fairfront_core::ObjectivePoint;

use crate::error::{Error, Result};
use crate::fmt_f64;

const MAGIC: &str = "fairfront-checkpoint 1";

pub fn encode(entry: &ArchiveEntry) -> Vec<u8> {
    let p = &entry.params;
    let header = format!(
        "{MAGIC}\narch {}\nid {}\nerror {}\ndelta_tpr {}\nvalues {}\nend\n",
        p.arch().descriptor(),
        entry.id,
        fmt_f64(entry.objectives.error),
        fmt_f64(entry.objectives.delta_tpr),
        p.len()
    );
    let mut out = header.into_bytes();
    out.reserve(p.len() * 8);
    for v in p.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> std::result::Result<ArchiveEntry, String> {
    let mut rest = bytes;
    let mut line = || -> std::result::Result<&str, String> {
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or("truncated header")?;
        let text = std::str::from_utf8(&rest[..end]).map_err(|_| "header is not UTF-8")?;
        rest = &rest[end + 1..];
        Ok(text)
    };
    if line()? != MAGIC {
        return Err("bad magic line".into());
    }
    fn field<'a>(text: &'a str, key: &str) -> std::result::Result<&'a str, String> {
        text.strip_prefix(key)
            .and_then(|s| s.strip_prefix(' '))
            .ok_or_else(|| format!("expected `{key}` line, got {text:?}"))
    }
    let arch = Architecture::parse_descriptor(field(line()?, "arch")?).map_err(|e| e.to_string())?;
    let id: u64 = field(line()?, "id")?.parse().map_err(|_| "bad id")?;
    let error: f64 = field(line()?, "error")?.parse().map_err(|_| "bad error")?;
    let delta_tpr: f64 = field(line()?, "delta_tpr")?.parse().map_err(|_| "bad delta_tpr")?;
    let count: usize = field(line()?, "values")?.parse().map_err(|_| "bad value count")?;
    if line()? != "end" {
        return Err("missing end line".into());
    }
    if rest.len() != count * 8 {
        return Err(format!("expected {} payload bytes, found {}", count * 8, rest.len()));
    }
    let values = rest
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let params = ParamVector::from_values(&arch, values).map_err(|e| e.to_string())?;
    Ok(ArchiveEntry {
        id,
        objectives: ObjectivePoint::new(error, delta_tpr),
        params,
    })
}

pub fn write(entry: &ArchiveEntry, path: &Path) -> Result<()> {
    fs::write(path, encode(entry)).map_err(|e| Error::io(path, e))
}

pub fn read(path: &Path) -> Result<ArchiveEntry> {
    let bytes = fs::read(path).map_err(|e| Error::artifact(path, e.to_string()))?;
    decode(&bytes).map_err(|m| Error::artifact(path, m))
}
