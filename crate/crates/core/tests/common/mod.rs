//! Reference data shared by the integration tests.

// (l, t, |T|, |M|, M') for p = 5 tower pairs, reference values.
pub const TOWER_PAIR_ROWS: &[(u64, u32, u64, u64, u64)] = &[
    (0, 1, 6, 26, 10),
    (36, 1, 726, 746, 730),
    (1, 1, 26, 46, 30),
    (37, 1, 746, 766, 750),
    (2, 1, 46, 66, 50),
    (7, 2, 726, 826, 746),
    (0, 2, 26, 126, 46),
    (40, 1, 806, 826, 810),
    (5, 1, 106, 126, 110),
    (41, 1, 826, 846, 830),
    (6, 1, 126, 146, 130),
    (42, 1, 846, 866, 850),
    (7, 1, 146, 166, 150),
    (8, 2, 826, 926, 846),
    (1, 2, 126, 226, 146),
    (45, 1, 906, 926, 910),
    (10, 1, 206, 226, 210),
    (46, 1, 926, 946, 930),
    (11, 1, 226, 246, 230),
    (47, 1, 946, 966, 950),
    (12, 1, 246, 266, 250),
    (9, 2, 926, 1026, 946),
    (2, 2, 226, 326, 246),
    (50, 1, 1006, 1026, 1010),
    (15, 1, 306, 326, 310),
    (51, 1, 1026, 1046, 1030),
    (16, 1, 326, 346, 330),
    (52, 1, 1046, 1066, 1050),
    (17, 1, 346, 366, 350),
    (1, 3, 626, 1126, 714),
    (3, 2, 326, 426, 346),
    (10, 2, 1026, 1126, 1046),
    (20, 1, 406, 426, 410),
    (55, 1, 1106, 1126, 1110),
    (21, 1, 426, 446, 430),
    (56, 1, 1126, 1146, 1130),
    (22, 1, 446, 466, 450),
    (57, 1, 1146, 1166, 1150),
    (4, 2, 426, 526, 446),
    (11, 2, 1126, 1226, 1146),
    (25, 1, 506, 526, 510),
    (60, 1, 1206, 1226, 1210),
    (26, 1, 526, 546, 530),
    (61, 1, 1226, 1246, 1230),
    (27, 1, 546, 566, 550),
    (62, 1, 1246, 1266, 1250),
    (0, 3, 126, 626, 214),
    (5, 2, 526, 626, 546),
    (154, 1, 3086, 3106, 3090),
    (30, 1, 606, 626, 610),
    (0, 4, 626, 3126, 1050),
    (31, 1, 626, 646, 630),
    (5, 3, 2626, 3126, 2714),
    (32, 1, 646, 666, 650),
    (30, 2, 3026, 3126, 3046),
    (6, 2, 626, 726, 646),
    (155, 1, 3106, 3126, 3110),
    (35, 1, 706, 726, 710),
    (156, 1, 3126, 3146, 3130),
];
