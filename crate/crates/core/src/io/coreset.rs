use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::select::{CoreSet, CoreSetEntry};
use crate::{Error, Result};

/// JSONL encoding, one entry per line in core-set order.
pub fn coreset_to_jsonl(coreset: &CoreSet) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for entry in coreset.entries() {
        serde_json::to_writer(&mut out, entry)?;
        out.push(b'\n');
    }
    Ok(out)
}

pub fn write_coreset(coreset: &CoreSet, path: impl AsRef<Path>) -> Result<()> {
    super::write_atomic(path.as_ref(), &coreset_to_jsonl(coreset)?)
}

pub fn read_coreset(path: impl AsRef<Path>) -> Result<CoreSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut entries = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: CoreSetEntry = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        entries.push(entry);
    }
    CoreSet::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_line_file() {
        let cs = CoreSet::new(vec![
            CoreSetEntry::base("r1"),
            CoreSetEntry::sampled("r7", 3, 0.42),
        ])
        .unwrap();
        let text = String::from_utf8(coreset_to_jsonl(&cs).unwrap()).unwrap();
        assert_eq!(
            text,
            "{\"id\":\"r1\",\"origin\":\"base\",\"cluster\":null,\"distance\":null}\n\
             {\"id\":\"r7\",\"origin\":\"sampled\",\"cluster\":3,\"distance\":0.42}\n"
        );
    }

    #[test]
    fn empty_coreset_is_invalid() {
        assert!(matches!(CoreSet::new(vec![]), Err(Error::EmptyCoreSet)));
    }

    #[test]
    fn same_value_same_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let cs = CoreSet::new(vec![CoreSetEntry::sampled("a", 0, 1.0 / 3.0)]).unwrap();
        write_coreset(&cs, dir.path().join("x.jsonl")).unwrap();
        write_coreset(&cs, dir.path().join("y.jsonl")).unwrap();
        assert_eq!(
            std::fs::read(dir.path().join("x.jsonl")).unwrap(),
            std::fs::read(dir.path().join("y.jsonl")).unwrap()
        );
    }

    #[test]
    fn unwritable_path() {
        let cs = CoreSet::new(vec![CoreSetEntry::base("a")]).unwrap();
        assert!(matches!(
            write_coreset(&cs, "/nonexistent-dir/x.jsonl"),
            Err(Error::Io { .. })
        ));
    }

    proptest! {
        #[test]
        fn round_trip(entries in proptest::collection::vec((any::<bool>(), 0usize..10, 0.0f64..2.0), 1..40)) {
            let entries: Vec<_> = entries
                .into_iter()
                .enumerate()
                .map(|(i, (base, c, d))| if base {
                    CoreSetEntry::base(format!("id-{i}"))
                } else {
                    CoreSetEntry::sampled(format!("id \"{i}\""), c, d)
                })
                .collect();
            let cs = CoreSet::new(entries).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("c.jsonl");
            write_coreset(&cs, &p).unwrap();
            prop_assert_eq!(read_coreset(&p).unwrap(), cs);
        }
    }
}
