//! Captions a synthetic corpus with the default schedule and reports the rate.

use std::time::Instant;

use posecode_core::{synthetic, CaptionProfile, Captioner};

fn main() -> Result<(), posecode_core::Error> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1000);
    let captioner = Captioner::with_defaults()?;
    let schedule = CaptionProfile::default_schedule();
    let corpus = synthetic::varied_corpus(n, 1);
    let start = Instant::now();
    let mut chars = 0;
    for record in &corpus {
        for i in 0..3 {
            chars += captioner
                .caption_indexed(record, &schedule, 0, i)?
                .text
                .len();
        }
    }
    let secs = start.elapsed().as_secs_f64();
    println!(
        "{} captions in {secs:.2} s ({:.0}/s, {} chars)",
        3 * n,
        3.0 * n as f64 / secs,
        chars
    );
    Ok(())
}
