use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::{Arc, RwLock};

use faer::Mat;
use sha2::{Digest, Sha256};

use super::profile::CouplingProfile;
use super::spectrum::SectorSpectrum;
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"CSPECTRA";
const VERSION: u32 = 1;

/// Identifies a sector spectrum by the exact bits of its inputs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpectrumKey {
    pub down: usize,
    pub field: u64,
    pub transverse: Vec<u64>,
    pub longitudinal: Vec<u64>,
}

impl SpectrumKey {
    pub fn new(profile: &CouplingProfile, field: f64, down: usize) -> Self {
        Self {
            down,
            field: field.to_bits(),
            transverse: profile.transverse().iter().map(|v| v.to_bits()).collect(),
            longitudinal: profile.longitudinal().iter().map(|v| v.to_bits()).collect(),
        }
    }
}

/// Thread-safe store of sector spectra, persistable to a checksummed file.
#[derive(Debug, Default)]
pub struct SpectrumCache {
    map: RwLock<HashMap<SpectrumKey, Arc<SectorSpectrum>>>,
}

impl SpectrumCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &SpectrumKey) -> Option<Arc<SectorSpectrum>> {
        self.map.read().expect("cache lock").get(key).cloned()
    }

    /// Inserts unless the key is present; returns the stored entry.
    pub fn insert(&self, key: SpectrumKey, spectrum: Arc<SectorSpectrum>) -> Arc<SectorSpectrum> {
        self.map
            .write()
            .expect("cache lock")
            .entry(key)
            .or_insert(spectrum)
            .clone()
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let map = self.map.read().expect("cache lock");
        let mut entries: Vec<_> = map.iter().collect();
        // stable file contents regardless of hash order
        entries.sort_by(|a, b| {
            (a.0.transverse.len(), a.0.down, a.0.field, &a.0.transverse, &a.0.longitudinal).cmp(&(
                b.0.transverse.len(),
                b.0.down,
                b.0.field,
                &b.0.transverse,
                &b.0.longitudinal,
            ))
        });

        let mut buf = Vec::new();
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.extend_from_slice(&(entries.len() as u64).to_le_bytes());
        for (key, spec) in entries {
            put_u64(&mut buf, key.transverse.len() as u64);
            put_u64(&mut buf, key.down as u64);
            put_u64(&mut buf, key.field);
            key.transverse.iter().for_each(|&v| put_u64(&mut buf, v));
            key.longitudinal.iter().for_each(|&v| put_u64(&mut buf, v));
            let d = spec.dim();
            put_u64(&mut buf, d as u64);
            spec.energies().iter().for_each(|e| put_u64(&mut buf, e.to_bits()));
            let v = spec.vectors();
            for k in 0..d {
                for i in 0..d {
                    put_u64(&mut buf, v[(i, k)].to_bits());
                }
            }
        }
        let digest = Sha256::digest(&buf);
        buf.extend_from_slice(digest.as_slice());

        let mut file = std::fs::File::create(path)?;
        file.write_all(&buf)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        if bytes.len() < MAGIC.len() + 4 + 8 + 32 {
            return Err(Error::Cache("file too short".into()));
        }
        let (body, trailer) = bytes.split_at(bytes.len() - 32);
        if Sha256::digest(body).as_slice() != trailer {
            return Err(Error::Cache("checksum mismatch".into()));
        }
        if &body[..8] != MAGIC {
            return Err(Error::Cache("not a spectrum cache".into()));
        }
        let version = u32::from_le_bytes(body[8..12].try_into().expect("4 bytes"));
        if version != VERSION {
            return Err(Error::Cache(format!("unsupported cache version {version}")));
        }
        let mut r = Reader { buf: body, pos: 12 };
        let count = r.u64()?;
        let mut map = HashMap::new();
        for _ in 0..count {
            let n = r.u64()? as usize;
            let down = r.u64()? as usize;
            let field = r.u64()?;
            let transverse = (0..n).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
            let longitudinal = (0..n).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
            let d = r.u64()? as usize;
            let energies = (0..d)
                .map(|_| r.u64().map(f64::from_bits))
                .collect::<Result<Vec<_>>>()?;
            let mut flat = Vec::with_capacity(d * d);
            for _ in 0..d * d {
                flat.push(f64::from_bits(r.u64()?));
            }
            let vectors = Mat::from_fn(d, d, |i, k| flat[k * d + i]);
            map.insert(
                SpectrumKey {
                    down,
                    field,
                    transverse,
                    longitudinal,
                },
                Arc::new(SectorSpectrum::from_parts(down, energies, vectors)),
            );
        }
        if r.pos != body.len() {
            return Err(Error::Cache("trailing bytes after last entry".into()));
        }
        Ok(Self {
            map: RwLock::new(map),
        })
    }
}

fn put_u64(buf: &mut Vec<u8>, v: u64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn u64(&mut self) -> Result<u64> {
        let end = self.pos + 8;
        let bytes = self
            .buf
            .get(self.pos..end)
            .ok_or_else(|| Error::Cache("truncated entry".into()))?;
        self.pos = end;
        Ok(u64::from_le_bytes(bytes.try_into().expect("8 bytes")))
    }
}
