"""Published reference values for the N=21, a=4 instance, copied verbatim.

Pauli labels here are written with qubit 0 rightmost (q1 q0 c2 c1 c0), the
opposite of the package's register order.
"""

MINIMAL_SETTINGS = """
XXXXZ XXXZX XXXZZ XXYYZ XXYZY XXZXX XXZXZ XXZYY XXZZX XYXYZ
XYXZY XYYXZ XYYZX XYYZZ XYZXY XYZYX XYZYZ XYZZY XZXXX XZXYY
XZXZZ XZYXY XZYYX XZZXZ XZZZX YXXYZ YXXZY YXYXZ YXYZX YXYZZ
YXZXY YXZYX YXZYZ YXZZY YYXXZ YYXZX YYXZZ YYYYZ YYYZY YYZXX
YYZXZ YYZYY YYZZX YZXXY YZXYX YZYXX YZYYY YZYZZ YZZYZ YZZZY
ZXXXZ ZXXZX ZXXZZ ZXYYZ ZXYZY ZXZXX ZXZXZ ZXZYY ZXZZX ZYXYZ
ZYXZY ZYYXZ ZYYZX ZYYZZ ZYZXY ZYZYX ZYZYZ ZYZZY ZZXXX ZZXXZ
ZZXYY ZZXZX ZZYXY ZZYYX ZZYYZ ZZYZY ZZZXX ZZZYY ZZZZZ
""".split()

ZZZZZ_DERIVABLE = """
ZZZZI ZZZIZ ZZZII ZZIZZ ZZIZI ZZIIZ ZZIII ZIZZZ ZIZZI ZIZIZ ZIZII ZIIZZ
ZIIZI ZIIIZ ZIIII IZZZZ IZZZI IZZIZ IZZII IZIZZ IZIZI IZIIZ IZIII IIZZZ
IIZZI IIZIZ IIZII IIIZZ IIIZI IIIIZ
""".split()

# Maximal squared overlap with product states across each cut, three decimals.
# One listed cut, "(c0q1)(c0c1q0)", repeats c0 and omits c2; it is kept
# separately and read as "(c2q1)(c0c1q0)".
BETA_TABLE = {
    "(c1)(c0c2q0q1)": 0.500,
    "(c2)(c0c1q0q1)": 0.500,
    "(q0)(c0c1c2q1)": 0.750,
    "(q1)(c0c1c2q0)": 0.625,
    "(c0c1)(c2q0q1)": 0.500,
    "(c0c2)(c1q0q1)": 0.500,
    "(c0q0)(c1c2q1)": 0.427,
    "(c0q1)(c1c2q0)": 0.570,
    "(q0q1)(c0c1c2)": 0.375,
    "(c1q1)(c0c2q0)": 0.570,
    "(c1q0)(c0c2q1)": 0.427,
    "(c2q0)(c0c1q1)": 0.427,
    "(c1c2)(c0q0q1)": 0.500,
}
MALFORMED_BETA = ("(c0q1)(c0c1q0)", "(c2q1)(c0c1q0)", 0.570)

N_PAULI_TERMS = 293
IDEAL_PEAKS = {"000": 0.35, "011": 0.25, "101": 0.25}
UNIFORM_DISTANCE = 0.4347
GREEDY_PRODUCT_OVERLAP = 0.30
OVERLAP_7Q = (0.677, 0.00365)
OVERLAP_27Q = (0.626, 0.00304)
EXCEPT_7Q = {"(c0c1c2q1)(q0)"}
EXCEPT_27Q = {"(c0c1c2q1)(q0)", "(c0c1c2q0)(q1)"}
