#pragma once
// Generated by tests/oracles/generate.py (mpmath, 40 digits). Do not edit.
namespace oracle {
inline constexpr double kLogGamma_7_3 = 0.17449043071143830523;
inline constexpr double kLogGamma_0_5 = 0.57236494292470008707;
inline constexpr double kLogGamma_3_7 = 1.4280723266653879219;
inline constexpr double kLogGamma_12_25 = 18.115669505710892619;
inline constexpr double kLogGamma_49_5 = 142.6172828211459826;
inline constexpr double kCpn_2_1 = 0.28209479177387814347;
inline constexpr double kCpn_2_3 = 0.022448390265645820211;
inline constexpr double kCpn_1_5_1 = 0.29627425777078778341;
inline constexpr double kCpn_3_2 = 0.074851535560958699206;
inline constexpr double kCpn_1_25_2 = 0.13187222485148941183;
inline constexpr double kCpn_4_1 = 0.31003155258249167076;
inline constexpr double kPsi_1_5_1 = 6.8157727790438535465;
inline constexpr double kPsi_1_5_2 = 12.481713017763256889;
inline constexpr double kPsi_1_5_3 = 17.533694191933667187;
inline constexpr double kPsi_3_1 = 97.849174655576387869;
inline constexpr double kPsi_3_2 = 240.54516582878140859;
inline constexpr double kPsi_3_3 = 417.84127843254097025;
inline constexpr double kH_1_5_1 = 1.549803040447748839;
inline constexpr double kI_1_5_1 = 0.66666666666666666667;
inline constexpr double kH_2_1 = 1.7655121234846453965;
inline constexpr double kI_2_1 = 0.5;
inline constexpr double kH_3_1 = 1.8940131825607839812;
inline constexpr double kI_3_1 = 0.33333333333333333333;
inline constexpr double kMoment_3_1 = 1.7320508075688772935;
inline constexpr double kGaussEntropy_1 = 1.7655121234846453965;
inline constexpr double kLsiConst_1_5_1 = 2.2164697071144155057;
inline constexpr double kLsiConst_3_2 = 4.5922486531504641163;
}  // namespace oracle
