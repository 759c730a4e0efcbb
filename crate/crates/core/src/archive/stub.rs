//! A minimal HTTP server that answers CDX queries and raw replay requests
//! from a fixture directory. Used to exercise the remote client offline.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};

use url::form_urlencoded;

use super::cdx::{parse_cdx, Capture};
use super::client::fixture_body_path;
use super::surt::canonicalize_url;
use super::timemap::TimeMap;
use crate::error::{Error, Result};

pub struct FixtureServer {
    addr: SocketAddr,
    shutdown: Arc<AtomicBool>,
    requests: Arc<AtomicUsize>,
    handle: Option<JoinHandle<()>>,
}

struct Shared {
    dir: PathBuf,
    by_key: HashMap<String, Vec<Capture>>,
}

impl FixtureServer {
    /// Binds an ephemeral localhost port and starts serving `dir`.
    pub fn start(dir: &Path) -> Result<Self> {
        let index_path = dir.join("captures.cdx");
        let text = std::fs::read_to_string(&index_path).map_err(|e| Error::io(&index_path, e))?;
        let mut by_key: HashMap<String, Vec<Capture>> = HashMap::new();
        for c in parse_cdx(&text)? {
            by_key.entry(c.urlkey.clone()).or_default().push(c);
        }
        let shared = Arc::new(Shared {
            dir: dir.to_path_buf(),
            by_key,
        });

        let listener =
            TcpListener::bind("127.0.0.1:0").map_err(|e| Error::Backend(e.to_string()))?;
        let addr = listener
            .local_addr()
            .map_err(|e| Error::Backend(e.to_string()))?;
        let shutdown = Arc::new(AtomicBool::new(false));
        let requests = Arc::new(AtomicUsize::new(0));
        let handle = {
            let shutdown = shutdown.clone();
            let requests = requests.clone();
            thread::spawn(move || {
                for stream in listener.incoming() {
                    if shutdown.load(Ordering::SeqCst) {
                        break;
                    }
                    let Ok(stream) = stream else { continue };
                    requests.fetch_add(1, Ordering::SeqCst);
                    let shared = shared.clone();
                    thread::spawn(move || {
                        let _ = serve(stream, &shared);
                    });
                }
            })
        };
        Ok(FixtureServer {
            addr,
            shutdown,
            requests,
            handle: Some(handle),
        })
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn request_count(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }
}

impl Drop for FixtureServer {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

fn serve(stream: TcpStream, shared: &Shared) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    reader.read_line(&mut request_line)?;
    loop {
        let mut header = String::new();
        if reader.read_line(&mut header)? == 0 || header == "\r\n" || header == "\n" {
            break;
        }
    }
    let target = request_line.split_whitespace().nth(1).unwrap_or("");
    let (status, body) = route(target, shared);
    let mut stream = stream;
    write!(
        stream,
        "HTTP/1.1 {status}\r\nContent-Type: text/plain\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        body.len()
    )?;
    stream.write_all(&body)?;
    stream.flush()
}

fn route(target: &str, shared: &Shared) -> (&'static str, Vec<u8>) {
    if let Some(query) = target.strip_prefix("/cdx/search/cdx?") {
        let params: HashMap<String, String> = form_urlencoded::parse(query.as_bytes())
            .into_owned()
            .collect();
        let Some(Ok(key)) = params.get("url").map(|u| canonicalize_url(u)) else {
            return ("400 Bad Request", b"bad url".to_vec());
        };
        let year = |name: &str| params.get(name).and_then(|v| v.parse::<i32>().ok());
        let captures = shared.by_key.get(&key).cloned().unwrap_or_default();
        let tm = TimeMap::new([key], captures).within_years(year("from"), year("to"));
        let mut body = String::new();
        for c in tm.captures() {
            body.push_str(&c.to_cdx_line());
            body.push('\n');
        }
        return ("200 OK", body.into_bytes());
    }
    if let Some(rest) = target.strip_prefix("/web/") {
        if let Some((timestamp, original)) = rest.split_once("id_/") {
            let found = canonicalize_url(original).ok().and_then(|key| {
                shared
                    .by_key
                    .get(&key)?
                    .iter()
                    .find(|c| c.timestamp.as_str() == timestamp)
                    .cloned()
            });
            if let Some(capture) = found {
                if let Ok(bytes) = std::fs::read(shared.dir.join(fixture_body_path(&capture))) {
                    return ("200 OK", bytes);
                }
            }
        }
    }
    ("404 Not Found", b"not found".to_vec())
}
