//! File logger. Timestamps live here and only here; data files stay
//! deterministic.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

pub struct Logger {
    file: Option<fs::File>,
}

impl Logger {
    pub fn to_file(path: &Path) -> Logger {
        if let Some(parent) = path.parent() {
            let _ = fs::create_dir_all(parent);
        }
        Logger {
            file: fs::File::create(path).ok(),
        }
    }

    pub fn disabled() -> Logger {
        Logger { file: None }
    }

    pub fn log(&mut self, line: impl AsRef<str>) {
        if let Some(f) = self.file.as_mut() {
            let t = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs_f64())
                .unwrap_or(0.0);
            let _ = writeln!(f, "[{t:.3}] {}", line.as_ref());
        }
    }
}
