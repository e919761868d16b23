//! Overlay drawing: palm centres, fingertips and the reported angles.
//!
//! Text goes down first and marks after, so every mark's centre pixel carries
//! the mark colour at exactly the recorded coordinate.

use crate::image::{Point, RgbImage};
use crate::pipeline::FrameResult;

pub const COP_RGB: [u8; 3] = [255, 255, 0];
pub const TIP_RGB: [u8; 3] = [255, 255, 255];
pub const TEXT_RGB: [u8; 3] = [0, 255, 255];

/// 3x5 digit glyphs, one row per entry, most significant bit leftmost.
const DIGITS: [[u8; 5]; 10] = [
    [0b111, 0b101, 0b101, 0b101, 0b111],
    [0b010, 0b110, 0b010, 0b010, 0b111],
    [0b111, 0b001, 0b111, 0b100, 0b111],
    [0b111, 0b001, 0b111, 0b001, 0b111],
    [0b101, 0b101, 0b111, 0b001, 0b001],
    [0b111, 0b100, 0b111, 0b001, 0b111],
    [0b111, 0b100, 0b111, 0b101, 0b111],
    [0b111, 0b001, 0b010, 0b010, 0b010],
    [0b111, 0b101, 0b111, 0b101, 0b111],
    [0b111, 0b101, 0b111, 0b001, 0b111],
];

const GLYPH_ADVANCE: i32 = 4;
const LINE_HEIGHT: i32 = 7;

/// Draws digits and spaces with the top-left corner at `origin`; other
/// characters advance without drawing. Off-image pixels are skipped.
pub fn draw_text(img: &mut RgbImage, origin: Point, text: &str, rgb: [u8; 3]) {
    let mut col = origin.col;
    for ch in text.chars() {
        if let Some(d) = ch.to_digit(10) {
            for (dy, bits) in DIGITS[d as usize].iter().enumerate() {
                for dx in 0..3 {
                    if bits & (0b100 >> dx) != 0 {
                        put(img, Point::new(origin.row + dy as i32, col + dx), rgb);
                    }
                }
            }
        }
        col += GLYPH_ADVANCE;
    }
}

fn put(img: &mut RgbImage, p: Point, rgb: [u8; 3]) {
    if img.in_bounds(p) {
        img.put(p, rgb);
    }
}

/// Plus-shaped mark of arm length `arm` centred on `at`.
pub fn draw_mark(img: &mut RgbImage, at: Point, arm: i32, rgb: [u8; 3]) {
    for k in -arm..=arm {
        put(img, at.translated(k, 0), rgb);
        put(img, at.translated(0, k), rgb);
    }
}

/// Overlay of one frame's result. A result with no hands returns an
/// unmodified copy.
pub fn annotate(frame: &RgbImage, result: &FrameResult) -> RgbImage {
    let mut out = frame.clone();
    // angle lines, one per hand in finger order
    let mut line = 0;
    for hand in &result.hands {
        if hand.angles.is_empty() {
            continue;
        }
        let text: Vec<String> = hand.angles.iter().map(|a| format!("{:.0}", a.a2)).collect();
        draw_text(&mut out, Point::new(2 + line * LINE_HEIGHT, 2), &text.join(" "), TEXT_RGB);
        line += 1;
    }
    for hand in &result.hands {
        for tip in &hand.tips {
            draw_mark(&mut out, Point::new(tip.row, tip.col), 1, TIP_RGB);
        }
    }
    for hand in &result.hands {
        if let Some(cop) = hand.cop {
            draw_mark(&mut out, cop, 2, COP_RGB);
        }
    }
    out
}
