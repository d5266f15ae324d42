use perscribe::metrics::{content_overlap, readability, text_stats, TextStats};
use perscribe::Config;

#[test]
fn fifty_word_paragraph_matches_hand_tally() {
    let text = "This app can send text messages without asking you. It may read your contacts and share them \
                with a remote server. Some of these actions cost money. Others leak private data. You should \
                check the permission list before you install the app, and remove it if the risk seems high.";
    // Tallied per sentence: words 9+12+6+4+19, syllables 13+15+8+7+24,
    // letters 42+50+27+21+82; "messages" and "permission" are complex.
    let expected = TextStats {
        sentences: 5,
        words: 50,
        syllables: 67,
        characters: 222,
        complex_words: 2,
    };
    assert_eq!(text_stats(text), expected);
}

#[test]
fn equal_stats_give_equal_scores() {
    let a = text_stats("The cat sat on the mat.");
    let b = text_stats("The dog ran to the log.");
    assert_eq!(a, b);
    assert_eq!(readability(&a).unwrap(), readability(&b).unwrap());
}

#[test]
fn overlap_with_the_extravert_agreeable_example() {
    let config = Config::shipped();
    let filter = config.content_filter();
    let baseline = "App sends SMS messages.";
    let styled = "I mean, sending SMS messages doesn't have any security promise and this request is like, \
                  the suspicious permission at high risk!";
    // Baseline tokens {app, sends, sms, messages}; styled tokens {sending,
    // sms, messages, security, promise, request, suspicious, permission,
    // high, risk}. Shared 2, union 12.
    assert!((content_overlap(baseline, styled, &filter) - 2.0 / 12.0).abs() < 1e-12);
}
