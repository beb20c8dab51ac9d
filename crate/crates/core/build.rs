use std::process::Command;

fn main() {
    println!("cargo:rerun-if-changed=../../.git/HEAD");
    println!("cargo:rerun-if-env-changed=ADSB_HQNN_GIT_REV");
    let rev = std::env::var("ADSB_HQNN_GIT_REV").ok().or_else(|| {
        let out = Command::new("git")
            .args(["rev-parse", "--short=12", "HEAD"])
            .output()
            .ok()?;
        out.status
            .success()
            .then(|| String::from_utf8_lossy(&out.stdout).trim().to_string())
    });
    if let Some(rev) = rev {
        println!("cargo:rustc-env=ADSB_HQNN_GIT_REV={rev}");
    }
}
