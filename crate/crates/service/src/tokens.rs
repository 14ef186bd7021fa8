//! Opaque image ids. Clients see a salted hash in place of the drawing
//! address, which would otherwise reveal the stress level.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};
use stresslab::stimulus::DrawingRef;

use crate::error::{Result, ServiceError};

const SALT_FILE: &str = "drawing-salt";
const TOKEN_HEX_LEN: usize = 24;

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Loads the salt stored in `data_dir`, creating it on first use so that
/// image ids stay stable across restarts.
pub fn load_or_create_salt(data_dir: &Path) -> Result<String> {
    let path = data_dir.join(SALT_FILE);
    match fs::read_to_string(&path) {
        Ok(s) if !s.trim().is_empty() => Ok(s.trim().to_owned()),
        _ => {
            let salt = hex(&rand::random::<[u8; 16]>());
            fs::create_dir_all(data_dir).map_err(ServiceError::io(format!("create {}", data_dir.display())))?;
            fs::write(&path, &salt).map_err(ServiceError::io(format!("write {}", path.display())))?;
            Ok(salt)
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct DrawingTokens {
    salt: String,
    by_token: HashMap<String, DrawingRef>,
    by_ref: HashMap<DrawingRef, String>,
}

impl DrawingTokens {
    pub fn new(salt: impl Into<String>, refs: impl IntoIterator<Item = DrawingRef>) -> Self {
        let mut tokens = Self { salt: salt.into(), ..Self::default() };
        for id in refs {
            let token = tokens.token_for(&id);
            tokens.by_token.insert(token.clone(), id);
            tokens.by_ref.insert(id, token);
        }
        tokens
    }

    fn token_for(&self, id: &DrawingRef) -> String {
        let digest = Sha256::new()
            .chain_update(self.salt.as_bytes())
            .chain_update(b":")
            .chain_update(id.to_string().as_bytes())
            .finalize();
        hex(&digest)[..TOKEN_HEX_LEN].to_owned()
    }

    pub fn token(&self, id: &DrawingRef) -> Option<&str> {
        self.by_ref.get(id).map(String::as_str)
    }

    pub fn resolve(&self, token: &str) -> Option<DrawingRef> {
        self.by_token.get(token).copied()
    }
}
