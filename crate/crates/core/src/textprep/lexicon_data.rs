// Seed lexicon: 25 cue words per Plutchik emotion, each mapped to exactly one
// emotion with weight 1.0. Ekman taxonomies use the subset without trust and
// anticipation.

pub(super) const SEED: &[(&str, &[&str])] = &[
    (
        "joy",
        &[
            "happy", "joy", "joyful", "delighted", "cheerful", "glad", "celebrate",
            "celebration", "wonderful", "delight", "pleased", "elated", "bliss", "smile",
            "laughter", "thrilled", "jubilant", "ecstatic", "merry", "festive", "gleeful",
            "rejoice", "content", "beaming", "grateful",
        ],
    ),
    (
        "surprise",
        &[
            "surprise", "surprised", "surprising", "astonished", "amazed", "amazing",
            "unexpected", "stunned", "stunning", "startled", "astonishing", "sudden",
            "suddenly", "unbelievable", "wow", "bewildered", "remarkable", "unforeseen",
            "abrupt", "dumbfounded", "speechless", "unanticipated", "astound", "astounded",
            "flabbergasted",
        ],
    ),
    (
        "trust",
        &[
            "trust", "trusted", "reliable", "honest", "faithful", "loyal", "credible",
            "dependable", "sincere", "confidence", "trustworthy", "verified", "authentic",
            "integrity", "assurance", "reassure", "reassuring", "truthful", "accountable",
            "transparent", "genuine", "endorse", "vouch", "proven", "steadfast",
        ],
    ),
    (
        "anger",
        &[
            "angry", "anger", "furious", "rage", "outrage", "outraged", "hate", "hatred",
            "hostile", "fury", "irate", "livid", "resent", "resentment", "annoyed",
            "infuriated", "enraged", "wrath", "seething", "bitter", "aggressive", "attack",
            "violent", "slam", "blast",
        ],
    ),
    (
        "anticipation",
        &[
            "anticipate", "anticipation", "expect", "expectation", "await", "awaiting",
            "eager", "upcoming", "hope", "hopeful", "plan", "prepare", "soon", "forthcoming",
            "prospect", "foresee", "predict", "forecast", "countdown", "imminent",
            "impending", "waiting", "ready", "future", "eventual",
        ],
    ),
    (
        "sadness",
        &[
            "sad", "sadness", "sorrow", "grief", "grieve", "mourn", "mourning", "tragic",
            "tragedy", "heartbroken", "depressed", "unhappy", "miserable", "lonely",
            "despair", "weep", "tears", "cry", "gloomy", "melancholy", "loss", "regret",
            "hopeless", "devastated", "somber",
        ],
    ),
    (
        "disgust",
        &[
            "disgust", "disgusting", "disgusted", "gross", "revolting", "repulsive", "vile",
            "nasty", "filthy", "sickening", "repugnant", "loathe", "loathsome", "abhorrent",
            "despicable", "foul", "rotten", "nauseating", "appalling", "obscene", "sleazy",
            "creepy", "contempt", "scandalous", "shameful",
        ],
    ),
    (
        "fear",
        &[
            "fear", "afraid", "scared", "terror", "terrified", "panic", "horror",
            "frightened", "dread", "anxious", "anxiety", "alarm", "alarming", "threat",
            "threatening", "danger", "dangerous", "scary", "nervous", "worried", "worry",
            "horrified", "frightening", "menace", "deadly",
        ],
    ),
];
