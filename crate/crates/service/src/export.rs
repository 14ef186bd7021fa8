//! Deterministic tar archives of a study's session logs.

use std::fs;
use std::io::Read as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use stresslab::experiment::{Mode, SessionLog, SessionStatus};

use crate::error::{Result, ServiceError};
use crate::store::{study_dir, valid_study_id};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportedSession {
    pub session_id: String,
    pub participant_id: String,
    pub mode: Mode,
    pub size: usize,
    pub status: SessionStatus,
    pub responses: usize,
    pub questionnaire: bool,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportManifest {
    pub v: u32,
    pub study_id: String,
    pub sessions: Vec<ExportedSession>,
}

fn append(builder: &mut tar::Builder<Vec<u8>>, name: &str, data: &[u8]) -> Result<()> {
    let mut header = tar::Header::new_gnu();
    header.set_size(data.len() as u64);
    header.set_mode(0o644);
    header.set_mtime(0);
    header.set_uid(0);
    header.set_gid(0);
    header.set_entry_type(tar::EntryType::Regular);
    builder
        .append_data(&mut header, name, data)
        .map_err(ServiceError::io(format!("archive {name}")))
}

/// Packs the durable prefix of every session log of `study_id`, sorted by
/// session id, plus a manifest. Equal logs give byte-equal archives.
pub fn export_study(data_dir: &Path, study_id: &str) -> Result<Vec<u8>> {
    if !valid_study_id(study_id) {
        return Err(ServiceError::BadRequest(format!("invalid study id {study_id:?}")));
    }
    let dir = study_dir(data_dir, study_id);
    let mut paths: Vec<_> = match fs::read_dir(&dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
            .collect(),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(ServiceError::io(format!("list {}", dir.display()))(e)),
    };
    paths.sort();

    let mut files = Vec::new();
    let mut sessions = Vec::new();
    for path in paths {
        let text = fs::read_to_string(&path).map_err(ServiceError::io(format!("read {}", path.display())))?;
        let Ok((log, durable)) = SessionLog::parse(&text) else { continue };
        let file = format!("sessions/{}.jsonl", log.header.session_id);
        sessions.push(ExportedSession {
            session_id: log.header.session_id.clone(),
            participant_id: log.participant().to_owned(),
            mode: log.header.config.mode,
            size: log.header.config.size,
            status: log.status(),
            responses: log.responses.len(),
            questionnaire: log.questionnaire.is_some(),
            file: file.clone(),
        });
        files.push((file, text[..durable].to_owned()));
    }

    let manifest = ExportManifest { v: 1, study_id: study_id.to_owned(), sessions };
    let mut json = serde_json::to_vec_pretty(&manifest).map_err(stresslab::Error::from)?;
    json.push(b'\n');

    let mut builder = tar::Builder::new(Vec::new());
    append(&mut builder, MANIFEST_NAME, &json)?;
    for (name, text) in &files {
        append(&mut builder, name, text.as_bytes())?;
    }
    builder.into_inner().map_err(ServiceError::io("finish archive"))
}

/// Reads back an archive made by [`export_study`].
pub fn read_export(archive: &[u8]) -> Result<(ExportManifest, Vec<SessionLog>)> {
    let mut manifest = None;
    let mut logs = Vec::new();
    let mut reader = tar::Archive::new(archive);
    for entry in reader.entries().map_err(ServiceError::io("read archive"))? {
        let mut entry = entry.map_err(ServiceError::io("read archive"))?;
        let name = entry.path().map_err(ServiceError::io("read archive"))?.to_string_lossy().into_owned();
        let mut text = String::new();
        entry.read_to_string(&mut text).map_err(ServiceError::io(format!("read {name}")))?;
        if name == MANIFEST_NAME {
            manifest = Some(serde_json::from_str(&text).map_err(stresslab::Error::from)?);
        } else if name.ends_with(".jsonl") {
            logs.push(SessionLog::parse(&text)?.0);
        }
    }
    let manifest = manifest.ok_or_else(|| ServiceError::BadRequest("archive has no manifest".into()))?;
    Ok((manifest, logs))
}
