#![allow(dead_code)]

use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::time::{Duration, Instant};

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_colordiff"));
    cmd.env("RUST_LOG", "warn");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn colordiff")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn data(rel: &str) -> PathBuf {
    repo_root().join("data").join(rel)
}

/// A `colordiff serve` child process.
pub struct ServeProcess {
    pub child: Child,
    pub url: String,
    pub addr: String,
}

impl ServeProcess {
    pub fn start(data_dir: &Path, datasets: &Path) -> ServeProcess {
        let addr = {
            let l = TcpListener::bind("127.0.0.1:0").unwrap();
            l.local_addr().unwrap().to_string()
        };
        Self::start_at(&addr, data_dir, datasets)
    }

    pub fn start_at(addr: &str, data_dir: &Path, datasets: &Path) -> ServeProcess {
        let child = bin()
            .args(["serve", "--addr", addr, "--data-dir"])
            .arg(data_dir)
            .arg("--datasets")
            .arg(datasets)
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .expect("spawn serve");
        let url = format!("http://{addr}");
        let deadline = Instant::now() + Duration::from_secs(15);
        loop {
            if ureq::get(&format!("{url}/api/datasets")).call().is_ok() {
                break;
            }
            assert!(Instant::now() < deadline, "service at {addr} did not come up");
            std::thread::sleep(Duration::from_millis(20));
        }
        ServeProcess { child, url, addr: addr.to_string() }
    }

    /// SIGKILL: no chance to flush or clean up.
    pub fn kill(mut self) {
        self.child.kill().unwrap();
        self.child.wait().unwrap();
    }
}

impl Drop for ServeProcess {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
