//! Model checkpoints.
//!
//! Layout, all little-endian: magic `AMCP`, version u32 = 1; meta block
//! (strategy name as u16 length + UTF-8, then instance_dim, user_dim,
//! fixed_dim, hidden as u32, annotator count as u64, annotator ids each
//! u16 length + UTF-8); tensor count u32, then per tensor its name
//! (u16 length + UTF-8), element count u64, and elements as 64-bit
//! floats. Every named tensor is stored, empty ones with count 0, so
//! load(save(params)) reproduces the parameters bit for bit.

use crate::error::{read_err, write_err, CliError};
use annomod_core::model::{ModelMeta, ModelParams};
use annomod_core::repr::Strategy;
use std::collections::BTreeMap;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: [u8; 4] = *b"AMCP";
const VERSION: u32 = 1;

struct Reader<'a> {
    inner: BufReader<std::fs::File>,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn bytes(&mut self, n: usize, what: &str) -> Result<Vec<u8>, CliError> {
        let mut buf = vec![0u8; n];
        self.inner.read_exact(&mut buf).map_err(|e| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                CliError::Data(format!("{}: truncated {what}", self.path.display()))
            } else {
                read_err(self.path, e)
            }
        })?;
        Ok(buf)
    }

    fn u16(&mut self, what: &str) -> Result<u16, CliError> {
        let b = self.bytes(2, what)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self, what: &str) -> Result<u32, CliError> {
        let b = self.bytes(4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn u64(&mut self, what: &str) -> Result<u64, CliError> {
        let b = self.bytes(8, what)?;
        Ok(u64::from_le_bytes(b.try_into().expect("8 bytes")))
    }

    fn string(&mut self, what: &str) -> Result<String, CliError> {
        let len = self.u16(what)? as usize;
        let b = self.bytes(len, what)?;
        String::from_utf8(b).map_err(|_| {
            CliError::Data(format!("{}: {what} is not UTF-8", self.path.display()))
        })
    }
}

pub fn load_checkpoint(path: &Path) -> Result<ModelParams, CliError> {
    let file = std::fs::File::open(path).map_err(|e| read_err(path, e))?;
    let mut r = Reader {
        inner: BufReader::new(file),
        path,
    };

    if r.bytes(4, "header")? != MAGIC {
        return Err(CliError::Data(format!(
            "{}: bad magic, not a checkpoint",
            path.display()
        )));
    }
    let version = r.u32("header")?;
    if version != VERSION {
        return Err(CliError::Data(format!(
            "{}: unsupported version {version}",
            path.display()
        )));
    }

    let strategy = Strategy::parse(&r.string("strategy")?)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let instance_dim = r.u32("meta")? as usize;
    let user_dim = r.u32("meta")? as usize;
    let fixed_dim = r.u32("meta")? as usize;
    let hidden = r.u32("meta")? as usize;
    let count = r.u64("meta")?;
    let mut annotator_ids = Vec::with_capacity(count as usize);
    for _ in 0..count {
        annotator_ids.push(r.string("annotator id")?);
    }
    let meta = ModelMeta {
        strategy,
        instance_dim,
        user_dim,
        fixed_dim,
        hidden,
        annotator_ids,
    };

    let tensor_count = r.u32("tensor table")?;
    let mut tensors = BTreeMap::new();
    for _ in 0..tensor_count {
        let name = r.string("tensor name")?;
        let len = r.u64("tensor length")? as usize;
        let raw = r.bytes(len * 8, "tensor data")?;
        let values: Vec<f64> = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        if tensors.insert(name.clone(), values).is_some() {
            return Err(CliError::Data(format!(
                "{}: tensor '{name}' stored twice",
                path.display()
            )));
        }
    }

    ModelParams::from_parts(meta, tensors)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn save_checkpoint(params: &ModelParams, path: &Path) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|e| write_err(path, e))?;
    let mut w = BufWriter::new(file);
    let put = |w: &mut BufWriter<std::fs::File>, bytes: &[u8]| {
        w.write_all(bytes).map_err(|e| write_err(path, e))
    };
    let put_str = |w: &mut BufWriter<std::fs::File>, s: &str| -> Result<(), CliError> {
        let len = u16::try_from(s.len()).map_err(|_| {
            CliError::Data(format!("string '{s}' exceeds the 65535-byte limit"))
        })?;
        w.write_all(&len.to_le_bytes())
            .and_then(|()| w.write_all(s.as_bytes()))
            .map_err(|e| write_err(path, e))
    };

    put(&mut w, &MAGIC)?;
    put(&mut w, &VERSION.to_le_bytes())?;

    let meta = params.meta();
    put_str(&mut w, meta.strategy.as_str())?;
    for dim in [meta.instance_dim, meta.user_dim, meta.fixed_dim, meta.hidden] {
        put(&mut w, &(dim as u32).to_le_bytes())?;
    }
    put(&mut w, &(meta.annotator_ids.len() as u64).to_le_bytes())?;
    for id in &meta.annotator_ids {
        put_str(&mut w, id)?;
    }

    let tensors = params.tensors();
    put(&mut w, &(tensors.len() as u32).to_le_bytes())?;
    for (name, values) in tensors {
        put_str(&mut w, name)?;
        put(&mut w, &(values.len() as u64).to_le_bytes())?;
        for &x in values {
            put(&mut w, &x.to_le_bytes())?;
        }
    }
    w.flush().map_err(|e| write_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use annomod_core::model::init_model;
    use annomod_core::repr::{init_user_tokens, AnnotatorTable};

    fn model(strategy: Strategy, user_dim: usize, fixed_dim: usize) -> ModelParams {
        let ids: Vec<String> = (0..3).map(|i| format!("a{i}")).collect();
        let table = AnnotatorTable {
            strategy,
            annotator_ids: ids.clone(),
            user_dim,
            fixed_dim,
            user_init: init_user_tokens(&ids, user_dim, 5),
            fixed_init: (0..3 * fixed_dim).map(|i| i as f64 * 0.25 - 1.0).collect(),
        };
        init_model(&table, 4, 6, 17).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact_for_every_shape() {
        let dir = tempfile::tempdir().unwrap();
        let cases = [
            model(Strategy::None, 0, 0),
            model(Strategy::UserToken, 5, 0),
            model(Strategy::CompositeUser, 5, 8),
            model(Strategy::MultiTask, 0, 0),
        ];
        for (i, params) in cases.iter().enumerate() {
            let path = dir.path().join(format!("m{i}.bin"));
            save_checkpoint(params, &path).unwrap();
            let loaded = load_checkpoint(&path).unwrap();
            assert_eq!(&loaded, params);
            // Saving the loaded model reproduces the file bytes.
            let again = dir.path().join(format!("m{i}b.bin"));
            save_checkpoint(&loaded, &again).unwrap();
            assert_eq!(
                std::fs::read(&path).unwrap(),
                std::fs::read(&again).unwrap()
            );
        }
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.bin");

        std::fs::write(&path, b"XXXX\x01\x00\x00\x00").unwrap();
        let err = load_checkpoint(&path).unwrap_err();
        assert!(err.to_string().contains("bad magic"), "{err}");
        assert_eq!(err.exit_code(), 2);

        save_checkpoint(&model(Strategy::UserToken, 3, 0), &path).unwrap();
        let full = std::fs::read(&path).unwrap();
        std::fs::write(&path, &full[..full.len() - 5]).unwrap();
        let err = load_checkpoint(&path).unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");
    }
}
