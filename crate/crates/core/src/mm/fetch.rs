use std::fs::{self, File, OpenOptions};
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use flate2::read::GzDecoder;
use log::{debug, info};

use crate::error::{Error, Result};

/// Public SuiteSparse Matrix Collection download root.
pub const DEFAULT_BASE_URL: &str = "https://sparse.tamu.edu/MM";

/// Environment variable overriding the default cache directory.
pub const CACHE_ENV: &str = "REORDER_ADVISOR_CACHE";

const LOCK_TIMEOUT: Duration = Duration::from_secs(600);

/// `$REORDER_ADVISOR_CACHE`, else `$HOME/.cache/reorder-advisor`, else
/// `./.reorder-advisor-cache`.
pub fn default_cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_ENV) {
        return PathBuf::from(dir);
    }
    match std::env::var_os("HOME") {
        Some(home) => Path::new(&home).join(".cache").join("reorder-advisor"),
        None => PathBuf::from(".reorder-advisor-cache"),
    }
}

/// Downloads `<group>/<name>` from the public collection into `cache_dir`.
pub fn fetch_collection_matrix(group: &str, name: &str, cache_dir: impl Into<PathBuf>) -> Result<PathBuf> {
    Fetcher::new(cache_dir).fetch(group, name)
}

/// Cache-backed downloader for collection archives.
///
/// Matrices land at `<cache_dir>/<group>/<name>.mtx`. A cached file is
/// returned without touching the network.
#[derive(Clone, Debug)]
pub struct Fetcher {
    base_url: String,
    cache_dir: PathBuf,
    timeout: Duration,
}

impl Fetcher {
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        Fetcher {
            base_url: DEFAULT_BASE_URL.to_string(),
            cache_dir: cache_dir.into(),
            timeout: Duration::from_secs(300),
        }
    }

    pub fn with_base_url(mut self, base_url: impl Into<String>) -> Self {
        self.base_url = base_url.into().trim_end_matches('/').to_string();
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn cache_path(&self, group: &str, name: &str) -> PathBuf {
        self.cache_dir.join(group).join(format!("{name}.mtx"))
    }

    pub fn url(&self, group: &str, name: &str) -> String {
        format!("{}/{group}/{name}.tar.gz", self.base_url)
    }

    pub fn fetch(&self, group: &str, name: &str) -> Result<PathBuf> {
        let target = self.cache_path(group, name);
        if target.is_file() {
            debug!("cache hit {}", target.display());
            return Ok(target);
        }
        let dir = target.parent().expect("cache path has a parent");
        fs::create_dir_all(dir)?;

        let _lock = CacheLock::acquire(dir.join(format!("{name}.mtx.lock")))?;
        // another process may have finished while we waited
        if target.is_file() {
            return Ok(target);
        }

        let url = self.url(group, name);
        info!("downloading {url}");
        let archive = dir.join(format!("{name}.tar.gz.part"));
        let result = self
            .download(&url, &archive)
            .and_then(|()| extract_mtx(&archive, name, &target));
        let _ = fs::remove_file(&archive);
        result.map(|()| target)
    }

    fn download(&self, url: &str, dest: &Path) -> Result<()> {
        let fetch_err = |message: String| Error::Fetch {
            url: url.to_string(),
            message,
        };
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .build()
            .into();
        let mut response = agent.get(url).call().map_err(|e| fetch_err(e.to_string()))?;
        let mut file = File::create(dest)?;
        io::copy(&mut response.body_mut().as_reader(), &mut file)
            .map_err(|e| fetch_err(e.to_string()))?;
        Ok(())
    }
}

/// Pulls `<name>.mtx` out of a gzipped tarball and moves it into place.
fn extract_mtx(archive: &Path, name: &str, target: &Path) -> Result<()> {
    let wanted = format!("{name}.mtx");
    let mut tar = tar::Archive::new(GzDecoder::new(File::open(archive)?));
    let entries = tar
        .entries()
        .map_err(|_| Error::CorruptArchive(archive.to_path_buf()))?;
    for entry in entries {
        let mut entry = entry.map_err(|_| Error::CorruptArchive(archive.to_path_buf()))?;
        let matches = entry
            .path()
            .ok()
            .and_then(|p| p.file_name().map(|f| f == wanted.as_str()))
            .unwrap_or(false);
        if !matches {
            continue;
        }
        let partial = target.with_extension("mtx.part");
        let mut out = File::create(&partial)?;
        let mut buf = Vec::new();
        entry
            .read_to_end(&mut buf)
            .map_err(|_| Error::CorruptArchive(archive.to_path_buf()))?;
        io::Write::write_all(&mut out, &buf)?;
        drop(out);
        fs::rename(&partial, target)?;
        return Ok(());
    }
    Err(Error::CorruptArchive(archive.to_path_buf()))
}

/// Lock file created with `create_new`; removed on drop.
struct CacheLock {
    path: PathBuf,
}

impl CacheLock {
    fn acquire(path: PathBuf) -> Result<Self> {
        let start = Instant::now();
        loop {
            match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(_) => return Ok(CacheLock { path }),
                Err(e) if e.kind() == io::ErrorKind::AlreadyExists => {
                    if start.elapsed() > LOCK_TIMEOUT {
                        return Err(Error::Io(io::Error::new(
                            io::ErrorKind::TimedOut,
                            format!("timed out waiting for {}", path.display()),
                        )));
                    }
                    std::thread::sleep(Duration::from_millis(100));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
}

impl Drop for CacheLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}
