//! On-disk feature cache.
//!
//! Each entry is `<key>.f32` (little-endian `f32`, time-major `T × 128`) plus
//! a `<key>.meta` text sidecar of `name=value` lines. An entry is current when
//! its sidecar records the same audio content hash and frontend version.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

use super::{MelSpectrogram, FRONTEND_VERSION, N_MELS};

#[derive(Clone, Debug, PartialEq)]
pub struct CacheMeta {
    pub frames: usize,
    /// Length of the source audio in seconds.
    pub duration_seconds: f64,
    pub n_mels: usize,
    pub sample_rate: u32,
    pub hop_seconds: f64,
    pub window_seconds: f64,
    pub source: String,
    pub frontend_version: String,
    pub content_hash: String,
}

/// SHA-256 of the file bytes, hex encoded.
pub fn content_hash(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn entry_paths(dir: &Path, key: &str) -> (PathBuf, PathBuf) {
    (
        dir.join(format!("{key}.f32")),
        dir.join(format!("{key}.meta")),
    )
}

pub fn write_entry(
    dir: &Path,
    key: &str,
    mel: &MelSpectrogram,
    duration_seconds: f64,
    source: &Path,
    hash: &str,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let (data_path, meta_path) = entry_paths(dir, key);
    let mut bytes = Vec::with_capacity(mel.data.len() * 4);
    for x in &mel.data {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    fs::write(&data_path, bytes).map_err(|e| Error::io(&data_path, e))?;
    let meta = CacheMeta {
        frames: mel.frames,
        duration_seconds,
        n_mels: N_MELS,
        sample_rate: mel.sample_rate,
        hop_seconds: mel.hop_seconds,
        window_seconds: mel.window_seconds,
        source: source.display().to_string(),
        frontend_version: FRONTEND_VERSION.to_string(),
        content_hash: hash.to_string(),
    };
    fs::write(&meta_path, format_meta(&meta)).map_err(|e| Error::io(&meta_path, e))
}

fn format_meta(m: &CacheMeta) -> String {
    format!(
        "frames={}\nduration_seconds={}\nn_mels={}\nsample_rate={}\nhop_seconds={}\nwindow_seconds={}\nsource={}\nfrontend_version={}\ncontent_hash={}\n",
        m.frames, m.duration_seconds, m.n_mels, m.sample_rate, m.hop_seconds, m.window_seconds, m.source, m.frontend_version, m.content_hash
    )
}

pub fn read_meta(path: &Path) -> Result<CacheMeta> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let fields: BTreeMap<&str, &str> = text.lines().filter_map(|l| l.split_once('=')).collect();
    let get = |k: &str| {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| Error::Dataset(format!("{}: sidecar missing `{k}`", path.display())))
    };
    let num = |k: &str| -> Result<f64> {
        get(k)?
            .parse()
            .map_err(|_| Error::Dataset(format!("{}: bad `{k}`", path.display())))
    };
    Ok(CacheMeta {
        frames: num("frames")? as usize,
        duration_seconds: num("duration_seconds")?,
        n_mels: num("n_mels")? as usize,
        sample_rate: num("sample_rate")? as u32,
        hop_seconds: num("hop_seconds")?,
        window_seconds: num("window_seconds")?,
        source: get("source")?.to_string(),
        frontend_version: get("frontend_version")?.to_string(),
        content_hash: get("content_hash")?.to_string(),
    })
}

/// True when the entry exists and was built from `hash` by this frontend.
pub fn is_current(dir: &Path, key: &str, hash: &str) -> bool {
    let (data_path, meta_path) = entry_paths(dir, key);
    match read_meta(&meta_path) {
        Ok(m) => {
            m.content_hash == hash
                && m.frontend_version == FRONTEND_VERSION
                && fs::metadata(&data_path)
                    .map(|md| md.len() == (m.frames * m.n_mels * 4) as u64)
                    .unwrap_or(false)
        }
        Err(_) => false,
    }
}

pub fn read_entry(dir: &Path, key: &str) -> Result<(MelSpectrogram, CacheMeta)> {
    let (data_path, meta_path) = entry_paths(dir, key);
    let meta = read_meta(&meta_path)?;
    let bytes = fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?;
    if meta.n_mels != N_MELS || bytes.len() != meta.frames * meta.n_mels * 4 {
        return Err(Error::Dataset(format!(
            "{}: size does not match sidecar",
            data_path.display()
        )));
    }
    let data = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    let mel = MelSpectrogram {
        frames: meta.frames,
        data,
        sample_rate: meta.sample_rate,
        hop_seconds: meta.hop_seconds,
        window_seconds: meta.window_seconds,
    };
    Ok((mel, meta))
}
