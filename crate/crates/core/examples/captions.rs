//! Prints the three default captions of a few synthetic poses.

use posecode_core::{synthetic, CaptionProfile, Captioner};

fn main() -> Result<(), posecode_core::Error> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(3);
    let captioner = Captioner::with_defaults()?;
    let schedule = CaptionProfile::default_schedule();
    for record in synthetic::varied_corpus(n, 7) {
        println!("{}", record.pose_id);
        for i in 0..3 {
            let c = captioner.caption_indexed(&record, &schedule, 7, i)?;
            println!("  [{}] {}", c.profile, c.text);
        }
    }
    Ok(())
}
