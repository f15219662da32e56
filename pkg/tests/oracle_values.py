"""Reference values from scripts/compute_oracles.py (mpmath, 50 digits), frozen.

Parameter tuples are (alpha, beta, omega, rho, kappa) with base point 0.
"""

GAMMA_4_2_0_7I = complex(4.3899042882792293946366532022045354702612368239265, 5.7890644027976392554004614954351704354040105563937)

BINOM_MINUS_1_6_CHOOSE_3 = -2.496

ML_2_1_AT_1 = 1.5430806348152437784779056207570616826015291123659

# x^2 at x = 1, parameters (0.5, 0.8, 0.3, 1.2, 1)
GP_X2 = 0.52300564375697667571114919286026085259790822991531

# exp(-x^2), parameters (0.5, 0.7, 0.2, 1, 1)
GP_GAUSSIAN = {
    0.25: 0.44229212460570900899458745280373371995292290092447,
    0.5: 0.69175017089642319495995762437063714832924017007224,
    1.0: 0.91723359482641275433905986198716556815246426431567,
}

RL_0_3_SIN_AT_1 = 0.74903216991750981075418685614353612199308960115483
RL_0_7_EXP_AT_1 = 2.0691224851781018405664358600856890052403159593808

AB_INTEGRAL_HALF_X_AT_1 = 0.876126389031837524632052967707181723896033752886

# 1 + x at x = 1.5, parameters (0.9, 0.6, -0.4, 0.7, 1.3)
GP_KAPPA_1_3 = 2.2462259586156885269283525258125155841513982254141
