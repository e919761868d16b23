//! Palm centre as the mean of nearly full 30x30 windows, against ground truth.

use fingerangle::blob::{label_components, select_hands};
use fingerangle::palm::{find_cop, BASELINE_WINDOW};
use fingerangle::synth::{two_hand_corpus, CorpusParams};

fn main() {
    let session = &two_hand_corpus(&CorpusParams { sessions: 1, frames_per_session: 1, ..Default::default() })[0];
    let frame = &session.frames[0];
    let regions = label_components(&frame.silhouette);
    for hand in select_hands(&regions, 200) {
        let mask = regions.component_mask(hand.id);
        let truth = frame.truth.hands[hand.ordinal as usize].cop;
        for fill in [0.95, 1.0] {
            let palm = find_cop(&mask, &hand, BASELINE_WINDOW, fill).unwrap();
            println!(
                "hand {} fill {fill}: COP {:?} from {} windows, {:.2} px from the true centre {:?}",
                hand.ordinal,
                palm.cop,
                palm.candidate_count,
                palm.cop.distance(truth),
                truth
            );
        }
    }
}
