// Generated by tests/oracle/generate_reference.py -- do not edit by hand.
#pragma once

namespace fkl::oracle {

inline constexpr double kGamma7_25 = 1155.381013919989687202704;
inline constexpr double kGamma0_001 = 999.4237724845954661149822;
inline constexpr double kGamma12_3 = 83385367.89996985471289862;
inline constexpr double kGamma49_9 = 4.118011034253058041880115e+62;
inline constexpr double kLogGamma100_5 = 361.4355404677776215552519;
inline constexpr double kLogGamma1e6 = 12815504.56914761165997697;
inline constexpr double kLogGamma0_01 = 4.599479878042021722513945;

inline constexpr double kGammaGrid[][2] = {
    {0.001, 999.4237724845954661149822},
    {0.01, 99.43258511915060371353299},
    {0.1, 9.513507698668731836292487},
    {0.37, 2.403550020078653248455914},
    {0.5, 1.772453850905516027298167},
    {0.99, 1.005871979644107791934127},
    {1.5, 0.8862269254527580136490837},
    {2.75, 1.608359421985545659231942},
    {3.1, 2.197620278392477054183565},
    {4.9, 20.66738596185784825564937},
    {7.25, 1155.381013919989687202704},
    {10.0, 362880.0},
    {15.5, 334838609873.5564569724182},
    {22.25, 110177269872910029099.0111},
    {30.0, 8.841761993739701954543616e+30},
    {41.7, 1.095174647768803174195282e+49},
    {50.0, 6.082818640342675608722522e+62},
};

inline constexpr double kBesselJGrid[][3] = {
    {0, 0.5, 0.9384698072408129042284047},
    {0, 1.0, 0.7651976865579665514497175},
    {0, 2.4048255576957727686, 1.123013601399668449209579e-20},
    {0, 10.0, -0.2459357644513483351977609},
    {0, 123.4, -0.07152553671926019338867621},
    {0, 9876.5, 0.0009458336842728142471982965},
    {1, 0.5, 0.2422684576748738863839546},
    {1, 1.0, 0.4400505857449335159596822},
    {1, 10.0, 0.04347274616886143666974877},
    {1, 500.0, 0.01047261347037229284446709},
    {0.5, 0.25, 0.394799598741370046968539},
    {0.5, 1.5707963267948966192, 0.6366197723675813430818822},
    {0.5, 3.0, 0.0650081828773757781140047},
    {0.5, 80.0, -0.08866103581176545847511612},
    {1.5, 0.75, 0.1632232393566378500823987},
    {1.5, 2.0, 0.4912937786871623450068806},
    {1.5, 25.0, -0.1590178953860365798355561},
    {1.5, 4000.0, 0.009206608851627879747091601},
};

inline constexpr double kCAlpha_d3_a1 = 1.253314137315500251207883;
inline constexpr double kHardySharp_d3_a1 = 0.6366197723675813430755351;
inline constexpr double kBeta_d3_a1_delta05 = 2.74201929640710318080761;
inline constexpr double kBeta_d3_a1_delta03 = 2.861042463355680025602562;
inline constexpr double kBeta_d3_a06_delta05 = 2.747621800615586213232693;
inline constexpr double kBeta_d3_a15_delta05 = 2.786918396464349248789763;
inline constexpr double kLambda_beta2_d3_a1 = 0.6366197723675813430755351;
inline constexpr double kGammaD_1_3 = 19.73920880217871723766898;

inline constexpr double kFreeP0_d3_alpha06 = 2.026423672846755428877589;
inline constexpr double kFreeP0_d3_alpha1 = 0.1013211836423377714438795;
inline constexpr double kFreeP0_d3_alpha15 = 0.03377372788077925714795982;

}  // namespace fkl::oracle
