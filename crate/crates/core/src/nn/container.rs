use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"MSDS";
const VERSION: u32 = 1;

/// Versioned model container: a JSON metadata blob (config, registries,
/// featurizer state) plus named weight tensors stored as little-endian
/// 32-bit floats.
pub struct ModelContainer {
    pub metadata: serde_json::Value,
    pub tensors: BTreeMap<String, Array2<f64>>,
}

impl ModelContainer {
    pub fn new(metadata: serde_json::Value) -> Self {
        ModelContainer {
            metadata,
            tensors: BTreeMap::new(),
        }
    }

    pub fn add_tensor(&mut self, name: &str, tensor: &Array2<f64>) {
        self.tensors.insert(name.to_string(), tensor.clone());
    }

    pub fn take_tensor(&mut self, name: &str) -> Result<Array2<f64>> {
        self.tensors
            .remove(name)
            .ok_or_else(|| Error::Format(format!("container missing tensor {name:?}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        let json = serde_json::to_vec(&self.metadata)?;
        w.write_all(&(json.len() as u32).to_le_bytes())?;
        w.write_all(&json)?;
        w.write_all(&(self.tensors.len() as u32).to_le_bytes())?;
        for (name, tensor) in &self.tensors {
            let nb = name.as_bytes();
            w.write_all(&(nb.len() as u16).to_le_bytes())?;
            w.write_all(nb)?;
            w.write_all(&(tensor.nrows() as u32).to_le_bytes())?;
            w.write_all(&(tensor.ncols() as u32).to_le_bytes())?;
            for &x in tensor.iter() {
                w.write_all(&(x as f32).to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format(format!(
                "bad model magic {magic:?}, expected {MAGIC:?}"
            )));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(Error::Format(format!(
                "unsupported model version {version} (supported: {VERSION})"
            )));
        }
        let json_len = read_u32(&mut r)? as usize;
        let mut json = vec![0u8; json_len];
        r.read_exact(&mut json)?;
        let metadata: serde_json::Value = serde_json::from_slice(&json)?;
        let count = read_u32(&mut r)? as usize;
        let mut tensors = BTreeMap::new();
        for _ in 0..count {
            let mut len_buf = [0u8; 2];
            r.read_exact(&mut len_buf)?;
            let nlen = u16::from_le_bytes(len_buf) as usize;
            let mut nbuf = vec![0u8; nlen];
            r.read_exact(&mut nbuf)?;
            let name = String::from_utf8(nbuf)
                .map_err(|e| Error::Format(format!("bad tensor name: {e}")))?;
            let rows = read_u32(&mut r)? as usize;
            let cols = read_u32(&mut r)? as usize;
            let mut data = Vec::with_capacity(rows * cols);
            let mut fbuf = [0u8; 4];
            for _ in 0..rows * cols {
                r.read_exact(&mut fbuf)?;
                data.push(f32::from_le_bytes(fbuf) as f64);
            }
            let tensor = Array2::from_shape_vec((rows, cols), data)
                .map_err(|e| Error::Format(format!("tensor {name:?}: {e}")))?;
            tensors.insert(name, tensor);
        }
        Ok(ModelContainer { metadata, tensors })
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}
