//! Binary field snapshots.
//!
//! Layout, all integers little-endian:
//!
//! | bytes | content |
//! |---|---|
//! | 4 | magic `DYRL` |
//! | 2 | format version (1) |
//! | 1 | system tag |
//! | 1 | dim |
//! | 4 | n |
//! | 8 | t (f64) |
//! | 4 | field count |
//! | per field | u16 name length, UTF-8 name |
//! | payload | `count × n^dim` f64 physical samples, row-major, one field after another |

use std::path::Path;

use dyrl_core::solver::{Constants, SolverState, System};
use dyrl_core::Grid;

use crate::error::CliError;

pub const MAGIC: &[u8; 4] = b"DYRL";
pub const VERSION: u16 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub system: System,
    pub dim: usize,
    pub n: usize,
    pub t: f64,
    pub names: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8], String> {
        if self.buf.len() - self.pos < k {
            return Err(format!(
                "truncated: needed {k} bytes at offset {}, {} left",
                self.pos,
                self.buf.len() - self.pos
            ));
        }
        let s = &self.buf[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], String> {
        Ok(self.take(N)?.try_into().unwrap())
    }
}

impl Snapshot {
    pub fn from_state(state: &SolverState) -> Snapshot {
        Snapshot {
            system: state.system,
            dim: state.grid().dim(),
            n: state.grid().n(),
            t: state.t,
            names: state.system.field_names().iter().map(|s| s.to_string()).collect(),
            data: state.physical_components(),
        }
    }

    pub fn to_state(&self, constants: Constants) -> Result<SolverState, CliError> {
        let grid = Grid::new(self.dim, self.n)?;
        Ok(SolverState::from_physical_components(
            self.system,
            constants,
            &grid,
            self.t,
            self.data.clone(),
        )?)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let points: usize = self.data.iter().map(Vec::len).sum();
        let mut out = Vec::with_capacity(32 + 8 * points);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(self.system.tag());
        out.push(self.dim as u8);
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        out.extend_from_slice(&self.t.to_le_bytes());
        out.extend_from_slice(&(self.names.len() as u32).to_le_bytes());
        for name in &self.names {
            out.extend_from_slice(&(name.len() as u16).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
        }
        for comp in &self.data {
            for x in comp {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Snapshot, String> {
        let mut r = Reader { buf, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err("bad magic".to_string());
        }
        let version = u16::from_le_bytes(r.array()?);
        if version != VERSION {
            return Err(format!("unsupported format version {version}"));
        }
        let [tag] = r.array()?;
        let system = System::from_tag(tag).ok_or_else(|| format!("unknown system tag {tag}"))?;
        let [dim] = r.array()?;
        let dim = dim as usize;
        if dim != system.dim() {
            return Err(format!("dim {dim} does not match system {system}"));
        }
        let n = u32::from_le_bytes(r.array()?) as usize;
        let t = f64::from_le_bytes(r.array()?);
        let count = u32::from_le_bytes(r.array()?) as usize;
        if count != system.field_names().len() {
            return Err(format!("{count} fields, {system} has {}", system.field_names().len()));
        }
        let mut names = Vec::with_capacity(count);
        for _ in 0..count {
            let len = u16::from_le_bytes(r.array()?) as usize;
            let name = std::str::from_utf8(r.take(len)?).map_err(|e| format!("field name: {e}"))?;
            names.push(name.to_string());
        }
        let points = n
            .checked_pow(dim as u32)
            .ok_or_else(|| format!("grid n = {n} overflows"))?;
        let expected = count * points * 8;
        let left = buf.len() - r.pos;
        if left != expected {
            return Err(format!(
                "payload length {left} bytes, expected {count} x {n}^{dim} x 8 = {expected}"
            ));
        }
        let data = (0..count)
            .map(|_| {
                r.take(points * 8)
                    .unwrap()
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                    .collect()
            })
            .collect();
        Ok(Snapshot {
            system,
            dim,
            n,
            t,
            names,
            data,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_bytes()).map_err(CliError::io(format!("writing {}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Snapshot, CliError> {
        let buf = std::fs::read(path).map_err(CliError::io(format!("reading {}", path.display())))?;
        Snapshot::from_bytes(&buf).map_err(|reason| CliError::CorruptSnapshot {
            path: path.to_path_buf(),
            reason,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dyrl_core::solver::InitialCondition;

    fn sample() -> Snapshot {
        let grid = Grid::new(3, 8).unwrap();
        let c = Constants {
            nu: 0.1,
            mu: 0.1,
            ..Default::default()
        };
        let s = InitialCondition::TaylorGreen.build(System::Mhd, &grid, c).unwrap();
        Snapshot::from_state(&s)
    }

    #[test]
    fn bytes_round_trip_exactly() {
        let s = sample();
        let bytes = s.to_bytes();
        assert_eq!(bytes.len(), 4 + 2 + 1 + 1 + 4 + 8 + 4 + 6 * (2 + 3) + 6 * 512 * 8);
        let back = Snapshot::from_bytes(&bytes).unwrap();
        assert_eq!(back.to_bytes(), bytes);
        for (a, b) in back.data.iter().flatten().zip(s.data.iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rejects_corruption() {
        let bytes = sample().to_bytes();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert_eq!(Snapshot::from_bytes(&bad).unwrap_err(), "bad magic");
        assert!(Snapshot::from_bytes(&bytes[..bytes.len() - 8]).unwrap_err().contains("payload length"));
        assert!(Snapshot::from_bytes(&bytes[..10]).unwrap_err().contains("truncated"));
    }
}
