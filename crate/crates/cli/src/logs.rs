use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use stresslab::experiment::SessionLog;

fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        if path.is_dir() {
            walk(&path, out)?;
        } else if matches!(path.extension().and_then(|e| e.to_str()), Some("jsonl" | "tar")) {
            out.push(path);
        }
    }
    Ok(())
}

/// Session logs from `.jsonl` files, export archives, or directories holding
/// either (searched recursively, in path order).
pub fn collect_logs(inputs: &[PathBuf]) -> Result<Vec<SessionLog>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found = Vec::new();
            walk(input, &mut found)?;
            found.sort();
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    let mut logs = Vec::new();
    for file in files {
        if file.extension().is_some_and(|e| e == "tar") {
            let bytes = fs::read(&file).with_context(|| format!("reading {}", file.display()))?;
            let (_, exported) = stresslab_service::read_export(&bytes)
                .with_context(|| format!("reading archive {}", file.display()))?;
            logs.extend(exported);
        } else {
            logs.push(SessionLog::read(&file).with_context(|| format!("reading log {}", file.display()))?);
        }
    }
    Ok(logs)
}
