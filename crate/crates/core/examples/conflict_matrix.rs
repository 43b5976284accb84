//! Prints the 12 x 12 conflict classification of all movement pairs.
//!
//! Letters: E same entry, S same exit, L lateral crossing, . no conflict.

use cavx::{classify, ConflictClass, Movement};

fn main() {
    let all: Vec<Movement> = Movement::all().collect();
    print!("{:>12}", "");
    for m in &all {
        print!(
            " {:>3}",
            format!("{}{}", m.entry.letter(), &m.turn.name()[..1])
        );
    }
    println!();
    let mut counts = [0usize; 4];
    for a in &all {
        print!("{:>12}", a.to_string());
        for b in &all {
            let c = classify(*a, *b);
            counts[match c {
                ConflictClass::SameEntry => 0,
                ConflictClass::SameExit => 1,
                ConflictClass::Lateral => 2,
                ConflictClass::NoConflict => 3,
            }] += 1;
            print!(" {:>3}", c.letter());
        }
        println!();
    }
    println!(
        "\nsame entry {}, same exit {}, lateral {}, none {}",
        counts[0], counts[1], counts[2], counts[3]
    );
}
