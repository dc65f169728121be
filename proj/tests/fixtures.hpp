#pragma once

#include <string>

// Message texts shared by several suites.
namespace w3a::testing
{
inline std::string const opensea_message =
    "Welcome to OpenSea!\n\n"
    "This request will not trigger a blockchain transaction or\n"
    "cost any gas fees.\n"
    "Click to sign in and accept the OpenSea Terms of Service:\n"
    "https://opensea.io/tos\n\n"
    "Your authentication status will reset after 24 Hours.\n\n"
    "Wallet address: 0x36e7c6feb20a90b07f63863d09cc12c4c9f39064\n"
    "Nonce: 66ffb8f1-5eb1-4477-9558-36a60eb1b51f";

inline std::string const foundation_message =
    "Please sign this message to connect to Foundation.";

inline std::string const bmma_message =
    "Welcome! Please sign this message to connect to Foundation.com.\n\n"
    "Web3 Token Version: 2\n"
    "Nonce: 84800972\n"
    "Issued At: 2024-01-13T03:59:00.000Z\n"
    "Expiration Time: 2024-01-14T03:59:00.000Z\n\n"
    "Timestamp: 1706389762";

// Same OpenSea layout with a different wallet and nonce.
inline std::string opensea_like(std::string const& address, std::string const& nonce)
{
  return "Welcome to OpenSea!\n\n"
         "This request will not trigger a blockchain transaction or\n"
         "cost any gas fees.\n"
         "Click to sign in and accept the OpenSea Terms of Service:\n"
         "https://opensea.io/tos\n\n"
         "Your authentication status will reset after 24 Hours.\n\n"
         "Wallet address: " +
         address + "\nNonce: " + nonce;
}
}
