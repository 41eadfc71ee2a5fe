//! Binary checkpoints.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! b"ADFFCKPT"  u32 version
//! u32 config_len  config_len bytes of JSON ModelConfig
//! u32 tensor_count
//! repeated: u32 name_len, name (UTF-8), u32 ndim, ndim × u64 dims, f32 data
//! ```

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::nn::HasParams;

use super::{Adff, ModelConfig};

const MAGIC: &[u8; 8] = b"ADFFCKPT";
const VERSION: u32 = 1;

pub fn to_bytes(model: &Adff<f32>) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let cfg = serde_json::to_vec(model.config())?;
    out.extend_from_slice(&(cfg.len() as u32).to_le_bytes());
    out.extend_from_slice(&cfg);
    let tensors = model.named_tensors();
    out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
    for (name, shape, data) in tensors {
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(shape.len() as u32).to_le_bytes());
        for d in shape {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        for v in data {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Checkpoint("truncated checkpoint".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn from_bytes(bytes: &[u8]) -> Result<Adff<f32>> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let cfg_len = r.u32()? as usize;
    let config: ModelConfig = serde_json::from_slice(r.take(cfg_len)?)?;
    let mut model = Adff::<f32>::new(config, 0)?;
    let count = r.u32()? as usize;
    let mut loaded = std::collections::BTreeMap::new();
    for _ in 0..count {
        let name_len = r.u32()? as usize;
        let name = std::str::from_utf8(r.take(name_len)?)
            .map_err(|_| Error::Checkpoint("tensor name is not UTF-8".into()))?
            .to_string();
        let ndim = r.u32()? as usize;
        let shape = (0..ndim)
            .map(|_| r.u64().map(|d| d as usize))
            .collect::<Result<Vec<_>>>()?;
        let n: usize = shape.iter().product();
        let data: Vec<f32> = r
            .take(n * 4)?
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        loaded.insert(name, (shape, data));
    }
    if r.pos != bytes.len() {
        return Err(Error::Checkpoint("trailing bytes after tensors".into()));
    }
    let mut problem = None;
    let mut seen = 0;
    model.visit_mut(&mut |p| match loaded.get(&p.name) {
        Some((shape, data)) if *shape == p.shape => {
            p.value.copy_from_slice(data);
            seen += 1;
        }
        Some((shape, _)) => {
            problem.get_or_insert(format!(
                "{}: shape {:?}, expected {:?}",
                p.name, shape, p.shape
            ));
        }
        None => {
            problem.get_or_insert(format!("missing tensor {}", p.name));
        }
    });
    if let Some(p) = problem {
        return Err(Error::Checkpoint(p));
    }
    if seen != loaded.len() {
        return Err(Error::Checkpoint(
            "checkpoint holds tensors the model does not".into(),
        ));
    }
    Ok(model)
}

pub fn save(path: &Path, model: &Adff<f32>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, to_bytes(model)?).map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<Adff<f32>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes)
}
