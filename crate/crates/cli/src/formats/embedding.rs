//! Binary embedding files.
//!
//! Layout, all little-endian: magic `AEMB`, version u32 = 1, dim u32,
//! record count u64; then per record an id (u16 length + UTF-8 bytes)
//! and dim 32-bit floats. Load of a written store is bit-exact.

use crate::error::{read_err, write_err, CliError};
use annomod_core::encoder::EmbeddingStore;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: [u8; 4] = *b"AEMB";
const VERSION: u32 = 1;

fn truncated(path: &Path, what: &str) -> CliError {
    CliError::Data(format!("{}: truncated {what}", path.display()))
}

fn read_exact(
    r: &mut impl Read,
    buf: &mut [u8],
    path: &Path,
    what: &str,
) -> Result<(), CliError> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            truncated(path, what)
        } else {
            read_err(path, e)
        }
    })
}

pub fn load_embedding_file(path: &Path) -> Result<EmbeddingStore, CliError> {
    let file = std::fs::File::open(path).map_err(|e| read_err(path, e))?;
    let mut r = BufReader::new(file);

    let mut magic = [0u8; 4];
    read_exact(&mut r, &mut magic, path, "header")?;
    if magic != MAGIC {
        return Err(CliError::Data(format!(
            "{}: bad magic, not an embedding file",
            path.display()
        )));
    }
    let mut u32buf = [0u8; 4];
    read_exact(&mut r, &mut u32buf, path, "header")?;
    let version = u32::from_le_bytes(u32buf);
    if version != VERSION {
        return Err(CliError::Data(format!(
            "{}: unsupported version {version}",
            path.display()
        )));
    }
    read_exact(&mut r, &mut u32buf, path, "header")?;
    let dim = u32::from_le_bytes(u32buf) as usize;
    let mut u64buf = [0u8; 8];
    read_exact(&mut r, &mut u64buf, path, "header")?;
    let count = u64::from_le_bytes(u64buf);

    let mut store = EmbeddingStore::new(dim)?;
    for _ in 0..count {
        let mut lenbuf = [0u8; 2];
        read_exact(&mut r, &mut lenbuf, path, "record id")?;
        let id_len = u16::from_le_bytes(lenbuf) as usize;
        let mut id_bytes = vec![0u8; id_len];
        read_exact(&mut r, &mut id_bytes, path, "record id")?;
        let id = String::from_utf8(id_bytes)
            .map_err(|_| CliError::Data(format!("{}: id is not UTF-8", path.display())))?;
        let mut floats = vec![0u8; dim * 4];
        read_exact(&mut r, &mut floats, path, "record vector")?;
        let vector: Vec<f32> = floats
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        store
            .insert(&id, vector)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    Ok(store)
}

pub fn write_embedding_file(store: &EmbeddingStore, path: &Path) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|e| write_err(path, e))?;
    let mut w = BufWriter::new(file);
    let put = |w: &mut BufWriter<std::fs::File>, bytes: &[u8]| {
        w.write_all(bytes).map_err(|e| write_err(path, e))
    };
    put(&mut w, &MAGIC)?;
    put(&mut w, &VERSION.to_le_bytes())?;
    put(&mut w, &(store.dim() as u32).to_le_bytes())?;
    put(&mut w, &(store.len() as u64).to_le_bytes())?;
    for (id, vector) in store.iter() {
        let id_len = u16::try_from(id.len()).map_err(|_| {
            CliError::Data(format!("id '{id}' exceeds the 65535-byte limit"))
        })?;
        put(&mut w, &id_len.to_le_bytes())?;
        put(&mut w, id.as_bytes())?;
        for &x in vector {
            put(&mut w, &x.to_le_bytes())?;
        }
    }
    w.flush().map_err(|e| write_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_store() -> EmbeddingStore {
        let mut store = EmbeddingStore::new(3).unwrap();
        store.insert("a", vec![1.0, -2.5, 0.125]).unwrap();
        store.insert("zz", vec![f32::MIN_POSITIVE, 3.25, -0.0]).unwrap();
        store
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.aemb");
        let store = sample_store();
        write_embedding_file(&store, &path).unwrap();
        let loaded = load_embedding_file(&path).unwrap();
        assert_eq!(loaded.dim(), 3);
        assert_eq!(loaded.len(), 2);
        for (id, v) in store.iter() {
            let got = loaded.get(id).unwrap();
            let want: Vec<u32> = v.iter().map(|x| x.to_bits()).collect();
            let have: Vec<u32> = got.iter().map(|x| x.to_bits()).collect();
            assert_eq!(want, have);
        }
    }

    #[test]
    fn file_size_is_header_plus_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.aemb");
        let store = sample_store();
        write_embedding_file(&store, &path).unwrap();
        let expected: u64 = (4 + 4 + 4 + 8)
            + store
                .iter()
                .map(|(id, _)| 2 + id.len() as u64 + 3 * 4)
                .sum::<u64>();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), expected);
    }

    #[test]
    fn empty_store_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.aemb");
        write_embedding_file(&EmbeddingStore::new(7).unwrap(), &path).unwrap();
        let loaded = load_embedding_file(&path).unwrap();
        assert_eq!(loaded.dim(), 7);
        assert!(loaded.is_empty());
    }

    #[test]
    fn bad_magic_and_truncation_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.aemb");
        std::fs::write(&path, b"NOPE").unwrap();
        let err = load_embedding_file(&path).unwrap_err();
        assert!(err.to_string().contains("bad magic"), "{err}");
        assert_eq!(err.exit_code(), 2);

        write_embedding_file(&sample_store(), &path).unwrap();
        let full = std::fs::read(&path).unwrap();
        std::fs::write(&path, &full[..full.len() - 3]).unwrap();
        let err = load_embedding_file(&path).unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");
    }
}
